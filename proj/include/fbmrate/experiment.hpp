#pragma once

// Monte Carlo rate experiments: one fine path per replicate, coupled
// errors at every coarse n, (mean |e|^r)^{1/r} norms with batched-means
// standard errors, and a weighted log-log fit of the decay exponent.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fbmrate/discretize.hpp"
#include "fbmrate/errors.hpp"
#include "fbmrate/fbm.hpp"
#include "fbmrate/integrand.hpp"
#include "fbmrate/numerics.hpp"
#include "fbmrate/parallel.hpp"

#ifndef FBMRATE_VERSION
#define FBMRATE_VERSION "0.1.0"
#endif

namespace fbmrate {

inline constexpr std::string_view kLibraryVersion = FBMRATE_VERSION;
inline constexpr int kResultsSchemaVersion = 1;
inline constexpr std::size_t kBatches = 20;

enum class Scenario { FbmConvex, FbmGeometric, FbmLipschitz, BmConvex, BmLipschitz };

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::FbmConvex: return "fbm_convex";
    case Scenario::FbmGeometric: return "fbm_geometric";
    case Scenario::FbmLipschitz: return "fbm_lipschitz";
    case Scenario::BmConvex: return "bm_convex";
    case Scenario::BmLipschitz: return "bm_lipschitz";
  }
  return "unknown";
}

inline Scenario parse_scenario(std::string_view name) {
  for (auto s : {Scenario::FbmConvex, Scenario::FbmGeometric, Scenario::FbmLipschitz, Scenario::BmConvex,
                 Scenario::BmLipschitz}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown scenario '" + std::string(name) + "'");
}

inline bool is_brownian_scenario(Scenario s) { return s == Scenario::BmConvex || s == Scenario::BmLipschitz; }
inline bool is_lipschitz_scenario(Scenario s) { return s == Scenario::FbmLipschitz || s == Scenario::BmLipschitz; }

// Auto: pathwise chain rule for fBm, fine-grid reference for BM.
enum class OracleMode { Auto, FineGrid, Isometry };

inline std::string_view to_string(OracleMode m) {
  switch (m) {
    case OracleMode::Auto: return "auto";
    case OracleMode::FineGrid: return "fine_grid";
    case OracleMode::Isometry: return "isometry";
  }
  return "unknown";
}

inline OracleMode parse_oracle_mode(std::string_view name) {
  if (name == "auto") return OracleMode::Auto;
  if (name == "fine_grid") return OracleMode::FineGrid;
  if (name == "isometry") return OracleMode::Isometry;
  throw ValidationError("unknown oracle mode '" + std::string(name) + "'");
}

using Integrand = std::variant<ConvexSpec, LipschitzSpec>;

struct ExperimentConfig {
  Scenario scenario = Scenario::FbmConvex;
  double hurst = 0.75;
  Integrand integrand = ConvexSpec::call(0.0);
  std::vector<std::size_t> n_values;
  std::size_t fine_grid = 4096;
  std::size_t replicates = 10000;
  double r_norm = 1.0;
  std::optional<double> p_param;
  std::optional<double> beta_param;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  OracleMode oracle = OracleMode::Auto;
  int quadrature_points = 16;
  std::optional<SamplingMethod> method;

  SamplingMethod sampling_method() const {
    if (method) return *method;
    return is_brownian_scenario(scenario) ? SamplingMethod::IndependentIncrements
                                          : SamplingMethod::CirculantEmbedding;
  }

  OracleKind oracle_kind() const {
    if (oracle == OracleMode::Isometry) return OracleKind::IsometryExact;
    return is_brownian_scenario(scenario) ? OracleKind::FineGridReference : OracleKind::ItoPathwise;
  }

  double theoretical_exponent() const {
    switch (scenario) {
      case Scenario::FbmConvex:
      case Scenario::FbmGeometric: return hurst / p_param.value_or(NAN) - beta_param.value_or(NAN);
      case Scenario::FbmLipschitz: return 2.0 * hurst - 1.0 - epsilon;
      case Scenario::BmConvex: return 0.25;
      case Scenario::BmLipschitz: return 0.5;
    }
    return NAN;
  }

  void validate() const {
    if (n_values.size() < 3) throw ValidationError("n_values needs at least 3 entries for a slope fit");
    for (std::size_t i = 0; i < n_values.size(); ++i) {
      const std::size_t n = n_values[i];
      if (n == 0 || (n & (n - 1)) != 0) throw ValidationError("n_values must be powers of two, got " + std::to_string(n));
      if (i > 0 && !(n_values[i - 1] < n)) throw ValidationError("n_values must be strictly increasing");
      if (fine_grid % n != 0) {
        throw GridMismatchError("n = " + std::to_string(n) + " does not divide fine_grid = " + std::to_string(fine_grid));
      }
    }
    if (!(r_norm >= 1.0)) throw ValidationError("r_norm must be >= 1");
    const HurstParam h(hurst);
    const bool convex = std::holds_alternative<ConvexSpec>(integrand);
    if (is_lipschitz_scenario(scenario) == convex) {
      throw ValidationError(std::string("scenario ") + std::string(to_string(scenario)) + " needs a " +
                            (convex ? "Lipschitz" : "convex") + " integrand");
    }
    if (is_brownian_scenario(scenario)) {
      if (!h.is_brownian()) throw ValidationError("Brownian scenarios need H = 1/2, got " + std::to_string(hurst));
    } else {
      h.require_above_half(std::string(to_string(scenario)));
    }
    if (scenario == Scenario::FbmConvex || scenario == Scenario::FbmGeometric) {
      if (!p_param || !beta_param) throw ValidationError("p_param and beta_param are required for this scenario");
      if (auto why = rate_param_violation(h, *p_param, *beta_param)) throw ValidationError(*why);
      if (!(r_norm < *p_param)) {
        throw ValidationError("need 1 <= r < p, got r = " + std::to_string(r_norm) + ", p = " + std::to_string(*p_param));
      }
    }
    if (scenario == Scenario::FbmGeometric) {
      for (const auto& atom : std::get<ConvexSpec>(integrand).atoms()) {
        if (!(atom.location > 0.0)) {
          throw DomainError("geometric scenario needs atoms at positive locations, got " + std::to_string(atom.location));
        }
      }
    }
    if (scenario == Scenario::FbmLipschitz && !(epsilon > 0.0 && epsilon < 2.0 * hurst - 1.0)) {
      throw ValidationError("need 0 < epsilon < 2H - 1, got epsilon = " + std::to_string(epsilon));
    }
    if (oracle == OracleMode::Isometry) {
      if (scenario != Scenario::BmConvex) throw ValidationError("the isometry oracle applies to bm_convex only");
      if (std::get<ConvexSpec>(integrand).atoms().size() != 1) {
        throw ValidationError("the isometry oracle needs a single-atom integrand");
      }
      if (r_norm != 2.0) throw ValidationError("the isometry oracle gives the L2 norm; set r_norm = 2");
      if (quadrature_points < 4) throw ValidationError("quadrature_points must be >= 4");
      return;
    }
    if (oracle == OracleMode::FineGrid && !is_brownian_scenario(scenario)) {
      throw ValidationError("fine-grid reference is only used for Brownian scenarios");
    }
    if (is_brownian_scenario(scenario)) check_reference_resolution(fine_grid, n_values.back());
    if (replicates < kBatches) {
      throw ValidationError("need at least " + std::to_string(kBatches) + " replicates for batched means");
    }
    const auto m = sampling_method();
    if (m == SamplingMethod::IndependentIncrements && !h.is_brownian()) {
      throw ValidationError("independent-increment sampling is only exact for H = 1/2");
    }
  }
};

struct FitResult {
  double slope;         // decay exponent: error ~ n^{-slope}
  double slope_stderr;
  double intercept;     // log error at n = 1
};

struct RateEstimate {
  std::vector<std::size_t> n_values;
  std::vector<double> error_norms;
  std::vector<double> mc_stderr;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double theoretical_exponent = 0.0;
  bool passed = false;

  friend bool operator==(const RateEstimate&, const RateEstimate&) = default;
};

// Weighted least squares of log error on log n. The variance of log(err)
// is about (stderr/err)^2, so points get weight (err/stderr)^2; with any
// zero stderr (exact oracles) all points get unit weight. The slope
// standard error uses the residual-scaled covariance, so an exact power
// law has zero slope uncertainty.
inline FitResult fit_loglog(std::span<const std::size_t> n_values, std::span<const double> error_norms,
                            std::span<const double> stderrs) {
  const std::size_t k = n_values.size();
  if (k < 3) throw ValidationError("slope fit needs at least 3 points");
  if (error_norms.size() != k || stderrs.size() != k) throw ValidationError("fit inputs differ in length");
  bool unit = false;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(error_norms[i] > 0.0)) {
      throw DomainError("nonpositive error norm at n = " + std::to_string(n_values[i]) + " (oracle failure upstream?)");
    }
    if (!(stderrs[i] > 0.0)) unit = true;
  }
  std::vector<double> x(k), y(k), w(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = std::log(static_cast<double>(n_values[i]));
    y[i] = std::log(error_norms[i]);
    w[i] = unit ? 1.0 : (error_norms[i] / stderrs[i]) * (error_norms[i] / stderrs[i]);
  }
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw ValidationError("slope fit needs distinct n values");
  const double b = sxy / sxx;
  const double intercept = ybar - b * xbar;
  double rss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - (intercept + b * x[i]);
    rss += w[i] * r * r;
  }
  const double s2 = rss / static_cast<double>(k - 2);
  return {0.0 - b, std::sqrt(s2 / sxx), intercept};
}

namespace detail {

struct NormEstimate {
  double norm;
  double stderr_;
};

// (mean x)^{1/r} for x = |e|^r, with the standard error of the mean from
// kBatches contiguous batch means, propagated through the power by the
// delta method.
inline NormEstimate batched_norm(std::span<const double> powered, double r) {
  const std::size_t m = powered.size();
  std::vector<double> batch_means(kBatches);
  for (std::size_t b = 0; b < kBatches; ++b) {
    const std::size_t lo = b * m / kBatches;
    const std::size_t hi = (b + 1) * m / kBatches;
    batch_means[b] = pairwise_sum(powered.subspan(lo, hi - lo)) / static_cast<double>(hi - lo);
  }
  const double mean = pairwise_sum(powered) / static_cast<double>(m);
  std::vector<double> sq(kBatches);
  const double bm_mean = pairwise_sum(batch_means) / static_cast<double>(kBatches);
  for (std::size_t b = 0; b < kBatches; ++b) sq[b] = (batch_means[b] - bm_mean) * (batch_means[b] - bm_mean);
  const double var_of_batch = pairwise_sum(sq) / static_cast<double>(kBatches - 1);
  const double se_mean = std::sqrt(var_of_batch / static_cast<double>(kBatches));
  const double norm = std::pow(mean, 1.0 / r);
  const double se = mean > 0.0 ? norm / (r * mean) * se_mean : 0.0;
  return {norm, se};
}

}  // namespace detail

// Signed coupled errors e[k * n_values.size() + j] for replicate k at
// n_values[j]. Replicate k draws from stream (seed, k).
inline std::vector<double> coupled_errors(const ExperimentConfig& cfg, unsigned threads) {
  const std::size_t big_n = cfg.fine_grid;
  const std::size_t nn = cfg.n_values.size();
  const HurstParam h(cfg.hurst);
  const auto method = cfg.sampling_method();
  std::optional<CirculantSampler> circulant;
  std::optional<CholeskySampler> cholesky;
  if (method == SamplingMethod::CirculantEmbedding) circulant.emplace(h, big_n);
  if (method == SamplingMethod::Cholesky) cholesky.emplace(h, big_n);

  std::vector<double> errors(cfg.replicates * nn);
  parallel_for(cfg.replicates, threads, [&](std::size_t k) {
    thread_local std::vector<double> path;
    path.resize(big_n + 1);
    RandomStream rng(cfg.seed, k);
    switch (method) {
      case SamplingMethod::CirculantEmbedding: circulant->sample_into(rng, path); break;
      case SamplingMethod::Cholesky: cholesky->sample_into(rng, path); break;
      case SamplingMethod::IndependentIncrements: sample_bm_into(big_n, rng, path); break;
    }
    double* out = errors.data() + k * nn;
    switch (cfg.scenario) {
      case Scenario::FbmConvex: {
        const auto& spec = std::get<ConvexSpec>(cfg.integrand);
        const double oracle = ito_oracle(path, spec, h);
        for (std::size_t j = 0; j < nn; ++j) out[j] = riemann_sum(path, spec, cfg.n_values[j]) - oracle;
        break;
      }
      case Scenario::FbmGeometric: {
        const auto& spec = std::get<ConvexSpec>(cfg.integrand);
        for (auto& v : path) v = std::exp(v);
        const double oracle = ito_oracle(path, spec, h);
        for (std::size_t j = 0; j < nn; ++j) out[j] = riemann_sum(path, spec, cfg.n_values[j]) - oracle;
        break;
      }
      case Scenario::FbmLipschitz: {
        const auto& spec = std::get<LipschitzSpec>(cfg.integrand);
        const double oracle = ito_oracle(path, spec, h);
        for (std::size_t j = 0; j < nn; ++j) out[j] = riemann_sum(path, spec, cfg.n_values[j]) - oracle;
        break;
      }
      case Scenario::BmConvex: {
        const auto& spec = std::get<ConvexSpec>(cfg.integrand);
        const double ref = bm_reference(path, spec, big_n, cfg.n_values.back());
        for (std::size_t j = 0; j < nn; ++j) out[j] = riemann_sum(path, spec, cfg.n_values[j]) - ref;
        break;
      }
      case Scenario::BmLipschitz: {
        const auto& spec = std::get<LipschitzSpec>(cfg.integrand);
        const double ref = bm_reference(path, spec, big_n, cfg.n_values.back());
        for (std::size_t j = 0; j < nn; ++j) out[j] = riemann_sum(path, spec, cfg.n_values[j]) - ref;
        break;
      }
    }
  });
  return errors;
}

inline RateEstimate run_experiment(const ExperimentConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  RateEstimate est;
  est.n_values = cfg.n_values;
  est.theoretical_exponent = cfg.theoretical_exponent();
  const std::size_t nn = cfg.n_values.size();

  if (cfg.oracle == OracleMode::Isometry) {
    const auto& spec = std::get<ConvexSpec>(cfg.integrand);
    const Atom atom = spec.atoms().front();
    std::vector<double> norms(nn);
    parallel_for(nn, threads, [&](std::size_t j) {
      norms[j] = atom.mass * isometry_error_norm(cfg.n_values[j], atom.location, cfg.quadrature_points);
    });
    est.error_norms = std::move(norms);
    est.mc_stderr.assign(nn, 0.0);
  } else {
    const auto errors = coupled_errors(cfg, threads);
    std::vector<double> powered(cfg.replicates);
    std::string offending;
    for (std::size_t j = 0; j < nn; ++j) {
      for (std::size_t k = 0; k < cfg.replicates; ++k) powered[k] = std::pow(std::abs(errors[k * nn + j]), cfg.r_norm);
      const auto ne = detail::batched_norm(powered, cfg.r_norm);
      est.error_norms.push_back(ne.norm);
      est.mc_stderr.push_back(ne.stderr_);
      if (!(ne.stderr_ <= 0.5 * ne.norm)) offending += (offending.empty() ? "" : ", ") + std::to_string(cfg.n_values[j]);
    }
    if (!offending.empty()) {
      throw InsufficientReplicates("Monte Carlo standard error exceeds 50% of the estimate at n = " + offending +
                                   "; increase replicates");
    }
  }
  const auto fit = fit_loglog(est.n_values, est.error_norms, est.mc_stderr);
  est.slope = fit.slope;
  est.slope_stderr = fit.slope_stderr;
  est.intercept = fit.intercept;
  est.passed = est.slope + 2.0 * est.slope_stderr >= est.theoretical_exponent;
  return est;
}

// ---- serialization -------------------------------------------------------

using json = nlohmann::json;

inline json integrand_to_json(const Integrand& integrand) {
  if (const auto* lip = std::get_if<LipschitzSpec>(&integrand)) return json{{"lipschitz", std::string(lip->name())}};
  const auto& spec = std::get<ConvexSpec>(integrand);
  json atoms = json::array();
  for (const auto& a : spec.atoms()) atoms.push_back(json::array({a.location, a.mass}));
  json out{{"atoms", atoms}, {"slope0", spec.slope0()}, {"intercept0", spec.intercept0()}};
  if (!spec.label().empty()) out["label"] = spec.label();
  return out;
}

inline void require_known_keys(const json& j, std::initializer_list<std::string_view> known, std::string_view what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("unknown key '" + key + "' in " + std::string(what));
    }
  }
}

template <class T>
T json_get(const json& j, const char* key, std::string_view what) {
  if (!j.contains(key)) throw ValidationError("missing key '" + std::string(key) + "' in " + std::string(what));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("bad value for '" + std::string(key) + "' in " + std::string(what) + ": " + e.what());
  }
}

inline Integrand integrand_from_json(const json& j) {
  if (j.is_object() && j.contains("lipschitz")) {
    require_known_keys(j, {"lipschitz"}, "integrand");
    return LipschitzSpec::from_name(json_get<std::string>(j, "lipschitz", "integrand"));
  }
  require_known_keys(j, {"atoms", "slope0", "intercept0", "label"}, "integrand");
  std::vector<Atom> atoms;
  for (const auto& a : json_get<std::vector<std::vector<double>>>(j, "atoms", "integrand")) {
    if (a.size() != 2) throw ValidationError("each atom must be [location, mass]");
    atoms.push_back({a[0], a[1]});
  }
  return ConvexSpec(std::move(atoms), j.value("slope0", 0.0), j.value("intercept0", 0.0),
                    j.value("label", std::string{}));
}

inline json config_to_json(const ExperimentConfig& cfg) {
  json j{{"scenario", std::string(to_string(cfg.scenario))},
         {"hurst", cfg.hurst},
         {"integrand", integrand_to_json(cfg.integrand)},
         {"n_values", cfg.n_values},
         {"fine_grid", cfg.fine_grid},
         {"replicates", cfg.replicates},
         {"r_norm", cfg.r_norm},
         {"epsilon", cfg.epsilon},
         {"seed", cfg.seed},
         {"oracle", std::string(to_string(cfg.oracle))},
         {"quadrature_points", cfg.quadrature_points},
         {"method", std::string(to_string(cfg.sampling_method()))}};
  if (cfg.p_param) j["p_param"] = *cfg.p_param;
  if (cfg.beta_param) j["beta_param"] = *cfg.beta_param;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  constexpr std::string_view what = "experiment config";
  require_known_keys(j,
                     {"scenario", "hurst", "integrand", "n_values", "fine_grid", "replicates", "r_norm", "p_param",
                      "beta_param", "epsilon", "seed", "oracle", "quadrature_points", "method"},
                     what);
  ExperimentConfig cfg;
  cfg.scenario = parse_scenario(json_get<std::string>(j, "scenario", what));
  cfg.hurst = json_get<double>(j, "hurst", what);
  if (!j.contains("integrand")) throw ValidationError("missing key 'integrand' in experiment config");
  cfg.integrand = integrand_from_json(j.at("integrand"));
  cfg.n_values = json_get<std::vector<std::size_t>>(j, "n_values", what);
  cfg.fine_grid = json_get<std::size_t>(j, "fine_grid", what);
  cfg.replicates = json_get<std::size_t>(j, "replicates", what);
  cfg.seed = json_get<std::uint64_t>(j, "seed", what);
  if (j.contains("r_norm")) cfg.r_norm = json_get<double>(j, "r_norm", what);
  if (j.contains("p_param")) cfg.p_param = json_get<double>(j, "p_param", what);
  if (j.contains("beta_param")) cfg.beta_param = json_get<double>(j, "beta_param", what);
  if (j.contains("epsilon")) cfg.epsilon = json_get<double>(j, "epsilon", what);
  if (j.contains("oracle")) cfg.oracle = parse_oracle_mode(json_get<std::string>(j, "oracle", what));
  if (j.contains("quadrature_points")) cfg.quadrature_points = json_get<int>(j, "quadrature_points", what);
  if (j.contains("method")) cfg.method = parse_sampling_method(json_get<std::string>(j, "method", what));
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

inline json results_to_json(const RateEstimate& est, const ExperimentConfig& cfg) {
  json table = json::array();
  for (std::size_t i = 0; i < est.n_values.size(); ++i) {
    table.push_back({{"n", est.n_values[i]}, {"error_norm", est.error_norms[i]}, {"mc_stderr", est.mc_stderr[i]}});
  }
  json j{{"schema_version", kResultsSchemaVersion},
         {"library_version", std::string(kLibraryVersion)},
         {"seed", cfg.seed},
         {"config", config_to_json(cfg)},
         {"oracle_kind", std::string(to_string(cfg.oracle_kind()))},
         {"table", table},
         {"fit", {{"slope", est.slope}, {"slope_stderr", est.slope_stderr}, {"intercept", est.intercept}}},
         {"theoretical_exponent", est.theoretical_exponent},
         {"passed", est.passed}};
  if (const auto* spec = std::get_if<ConvexSpec>(&cfg.integrand)) {
    // Hypothesis integral for constant bookkeeping; always finite here.
    std::optional<HypothesisCheck> hc;
    std::string name;
    if (cfg.scenario == Scenario::FbmConvex && cfg.p_param) {
      hc = check_hypothesis(*spec, Hypothesis::H1, *cfg.p_param), name = "H1";
    } else if (cfg.scenario == Scenario::FbmGeometric && cfg.p_param) {
      hc = check_hypothesis(*spec, Hypothesis::H2, *cfg.p_param), name = "H2";
    } else if (cfg.scenario == Scenario::BmConvex) {
      hc = check_hypothesis(*spec, Hypothesis::H3, 1.0), name = "H3";
    }
    if (hc) j["hypothesis"] = {{"name", name}, {"holds", hc->holds}, {"integral", hc->integral_value}};
  }
  return j;
}

inline RateEstimate results_from_json(const json& j) {
  if (j.value("schema_version", 0) != kResultsSchemaVersion) throw ValidationError("unsupported results schema_version");
  RateEstimate est;
  for (const auto& row : j.at("table")) {
    est.n_values.push_back(row.at("n").get<std::size_t>());
    est.error_norms.push_back(row.at("error_norm").get<double>());
    est.mc_stderr.push_back(row.at("mc_stderr").get<double>());
  }
  est.slope = j.at("fit").at("slope").get<double>();
  est.slope_stderr = j.at("fit").at("slope_stderr").get<double>();
  est.intercept = j.at("fit").at("intercept").get<double>();
  est.theoretical_exponent = j.at("theoretical_exponent").get<double>();
  est.passed = j.at("passed").get<bool>();
  return est;
}

// Shortest round-trip decimal form.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::filesystem::path data_path_for(const std::filesystem::path& results_path) {
  auto p = results_path;
  p.replace_extension(".dat");
  return p;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError("directory '" + parent.string() + "' does not exist (writing '" + path.string() + "')");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out.flush()) throw IoError("write to '" + path.string() + "' failed");
}

// Writes the results JSON (sorted keys, no timestamp, so identical inputs
// give identical bytes) and a "log n, log error" data file next to it.
inline void persist_results(const RateEstimate& est, const ExperimentConfig& cfg, const std::filesystem::path& path) {
  write_text_file(path, results_to_json(est, cfg).dump(2) + "\n");
  std::string dat = "# log_n log_error\n";
  for (std::size_t i = 0; i < est.n_values.size(); ++i) {
    dat += format_double(std::log(static_cast<double>(est.n_values[i]))) + " " +
           format_double(std::log(est.error_norms[i])) + "\n";
  }
  write_text_file(data_path_for(path), dat);
}

inline RateEstimate load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file '" + path.string() + "'");
  try {
    return results_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ValidationError("malformed results file '" + path.string() + "': " + e.what());
  }
}

}  // namespace fbmrate
