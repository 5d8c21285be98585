// fbmrate: command-line front end.
//
// Exit status: 0 success, 1 bad input (validation, parse or I/O errors),
// 2 internal consistency failure.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fbmrate/fbmrate.hpp"

namespace {

using namespace fbmrate;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 1;
  bool quiet = false;
};

void progress(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

void echo_config(const json& cfg) { std::cerr << "config: " << cfg.dump() << '\n'; }

double parse_number(const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw ValidationError("not a number: '" + text + "'");
  return v;
}

// "0.1,0.2,0.5" or "lo:hi:count" (count evenly spaced points, inclusive).
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("range grid must be lo:hi:count, got '" + spec + "'");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double count = parse_number(parts[2]);
    if (!(count >= 1.0) || count != std::floor(count)) throw ValidationError("grid count must be a positive integer");
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
  }
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number(item));
  if (out.empty()) throw ValidationError("empty grid");
  return out;
}

std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError("directory '" + parent.string() + "' does not exist (writing '" + path + "')");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

// ---- simulate-paths ---------------------------------------------------------

struct SimulateArgs {
  double hurst = 0.75;
  std::size_t steps = 256;
  std::size_t count = 1;
  std::string method = "circulant";
  std::string out;
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  const HurstParam h(a.hurst);
  if (a.steps < 1) throw ValidationError("--steps must be at least 1");
  if (a.count < 1) throw ValidationError("--count must be at least 1");
  const auto method = parse_sampling_method(a.method);
  echo_config({{"command", "simulate-paths"}, {"hurst", a.hurst}, {"steps", a.steps}, {"count", a.count},
               {"method", a.method}, {"seed", g.seed}, {"out", a.out}});

  std::vector<std::vector<double>> paths(a.count);
  parallel_for(a.count, g.threads, [&](std::size_t k) {
    const auto p = sample_fbm(h, a.steps, g.seed, method, k);
    paths[k].assign(p.values().begin(), p.values().end());
  });
  auto out = open_output(a.out);
  out << "path_id,i,t,value\n";
  for (std::size_t k = 0; k < a.count; ++k) {
    for (std::size_t i = 0; i <= a.steps; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(a.steps);
      out << k << ',' << i << ',' << format_double(t) << ',' << format_double(paths[k][i]) << '\n';
    }
  }
  if (!out.flush()) throw IoError("write to '" + a.out + "' failed");
  std::cout << "wrote " << a.count << " path(s) of " << a.steps << " steps to " << a.out << '\n';
  return 0;
}

// ---- estimate-rate ----------------------------------------------------------

struct EstimateArgs {
  std::string config;
  std::string out;
};

int run_estimate(const Globals& g, const EstimateArgs& a) {
  auto cfg = load_config(a.config);
  if (g.seed_given) cfg.seed = g.seed;
  echo_config(config_to_json(cfg));
  cfg.validate();
  progress(g, "running " + std::string(to_string(cfg.scenario)) + " with " + std::to_string(cfg.replicates) +
                  " replicates on " + std::to_string(g.threads) + " thread(s)");
  const auto est = run_experiment(cfg, g.threads);
  persist_results(est, cfg, a.out);
  std::cout << "n error_norm mc_stderr\n";
  for (std::size_t i = 0; i < est.n_values.size(); ++i) {
    std::cout << est.n_values[i] << ' ' << format_double(est.error_norms[i]) << ' ' << format_double(est.mc_stderr[i])
              << '\n';
  }
  std::cout << "slope " << format_double(est.slope) << " +/- " << format_double(est.slope_stderr)
            << ", theoretical exponent " << format_double(est.theoretical_exponent) << ": "
            << (est.passed ? "PASS" : "FAIL") << '\n';
  return 0;
}

// ---- crossing-bound ---------------------------------------------------------

struct CrossingArgs {
  double hurst = 0.75;
  std::string s_grid = "0.1:0.9:9";
  std::string t_grid = "0.2:1:9";
  std::string a_grid = "-2:2:9";
  int quadrature_points = 32;
  std::string out;
};

int run_crossing(const Globals& g, const CrossingArgs& a) {
  const HurstParam h(a.hurst);
  const auto s = parse_grid(a.s_grid);
  const auto t = parse_grid(a.t_grid);
  const auto lv = parse_grid(a.a_grid);
  echo_config({{"command", "crossing-bound"}, {"hurst", a.hurst}, {"s_grid", s}, {"t_grid", t}, {"a_grid", lv},
               {"quadrature_points", a.quadrature_points}, {"out", a.out}});
  if (!h.is_brownian()) h.require_above_half("crossing-bound");
  const auto sweep = bound_ratio_sweep(h, s, t, lv, a.quadrature_points, g.threads);
  auto out = open_output(a.out);
  out << "s,t,a,probability,bound,ratio\n";
  for (const auto& e : sweep.entries) {
    out << format_double(e.s) << ',' << format_double(e.t) << ',' << format_double(e.a) << ','
        << format_double(e.result.probability) << ',' << format_double(e.result.bound_value) << ','
        << format_double(e.result.ratio) << '\n';
  }
  if (!out.flush()) throw IoError("write to '" + a.out + "' failed");
  std::cout << "max ratio " << format_double(sweep.max_ratio) << " at s=" << format_double(sweep.argmax.s)
            << " t=" << format_double(sweep.argmax.t) << " a=" << format_double(sweep.argmax.a) << " ("
            << sweep.entries.size() << " queries)\n";
  return 0;
}

// ---- besov ------------------------------------------------------------------

struct BesovArgs {
  std::string input;
  double beta = 0.4;
  std::size_t path_id = 0;
  std::string out;
};

// Accepts the simulate-paths CSV (path_id,i,t,value) or one value per line.
std::vector<double> read_path_csv(const std::string& path, std::size_t path_id) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  std::vector<double> values;
  std::string line;
  bool header_checked = false;
  bool four_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_checked) {
      header_checked = true;
      if (line == "path_id,i,t,value") {
        four_columns = true;
        continue;
      }
      if (line == "value") continue;
    }
    if (four_columns) {
      std::vector<std::string> cols;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
      if (cols.size() != 4) throw ValidationError("malformed CSV row: '" + line + "'");
      if (static_cast<std::size_t>(parse_number(cols[0])) == path_id) values.push_back(parse_number(cols[3]));
    } else {
      values.push_back(parse_number(line));
    }
  }
  if (values.size() < 3) throw ValidationError("input path needs at least 3 samples (path_id " + std::to_string(path_id) + ")");
  return values;
}

int run_besov(const Globals& g, const BesovArgs& a) {
  echo_config({{"command", "besov"}, {"input", a.input}, {"beta", a.beta}, {"path_id", a.path_id}});
  const SampledFunction f(read_path_csv(a.input, a.path_id));
  progress(g, "computing seminorms on " + std::to_string(f.cells()) + " cells");
  const auto rep = besov_norms(f, a.beta);
  const json j{{"beta", rep.beta},
               {"norm_1beta", rep.norm_1beta},
               {"norm_2beta", rep.norm_2beta},
               {"sup_frac_derivative", rep.sup_frac_derivative},
               {"cells", f.cells()}};
  if (a.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_text_file(a.out, j.dump(2) + "\n");
    std::cout << "wrote " << a.out << '\n';
  }
  return 0;
}

// ---- verify-ito -------------------------------------------------------------

struct VerifyArgs {
  double hurst = 0.75;
  std::size_t steps = 4096;
  std::size_t paths = 1000;
  std::string integrand;
  std::string method = "circulant";
};

int run_verify(const Globals& g, const VerifyArgs& a) {
  const HurstParam h(a.hurst);
  if (a.steps < 2 || (a.steps & (a.steps - 1)) != 0) throw ValidationError("--steps must be a power of two >= 2");
  if (a.paths < 2) throw ValidationError("--paths must be at least 2");
  std::ifstream in(a.integrand);
  if (!in) throw IoError("cannot open integrand file '" + a.integrand + "'");
  json ij;
  try {
    ij = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + a.integrand + "': " + e.what());
  }
  const auto integrand = integrand_from_json(ij);
  const auto method = parse_sampling_method(a.method);
  echo_config({{"command", "verify-ito"}, {"hurst", a.hurst}, {"steps", a.steps}, {"paths", a.paths},
               {"integrand", integrand_to_json(integrand)}, {"method", a.method}, {"seed", g.seed}});
  if (h.is_brownian() || !(h.value() > 0.5)) {
    throw ContractViolation("verify-ito checks the pathwise chain rule, which needs H > 1/2");
  }
  std::vector<std::size_t> ns;
  for (std::size_t n = 2; n <= a.steps; n *= 2) ns.push_back(n);
  std::vector<double> abs_err(a.paths * ns.size());
  const CirculantSampler sampler(h, a.steps);
  parallel_for(a.paths, g.threads, [&](std::size_t k) {
    std::vector<double> path(a.steps + 1);
    RandomStream rng(g.seed, k);
    if (method == SamplingMethod::CirculantEmbedding) {
      sampler.sample_into(rng, path);
    } else {
      const auto p = sample_fbm(h, a.steps, g.seed, method, k);
      std::copy(p.values().begin(), p.values().end(), path.begin());
    }
    for (std::size_t j = 0; j < ns.size(); ++j) {
      double e = 0.0;
      if (const auto* c = std::get_if<ConvexSpec>(&integrand)) {
        e = riemann_sum(path, *c, ns[j]) - ito_oracle(path, *c, h);
      } else {
        const auto& l = std::get<LipschitzSpec>(integrand);
        e = riemann_sum(path, l, ns[j]) - ito_oracle(path, l, h);
      }
      abs_err[k * ns.size() + j] = std::abs(e);
    }
  });
  std::cout << "n mean_abs_error stderr\n";
  std::vector<double> col(a.paths), sq(a.paths);
  for (std::size_t j = 0; j < ns.size(); ++j) {
    for (std::size_t k = 0; k < a.paths; ++k) col[k] = abs_err[k * ns.size() + j];
    const double mean = pairwise_sum(col) / static_cast<double>(a.paths);
    for (std::size_t k = 0; k < a.paths; ++k) sq[k] = (col[k] - mean) * (col[k] - mean);
    const double se = std::sqrt(pairwise_sum(sq) / static_cast<double>(a.paths - 1) / static_cast<double>(a.paths));
    std::cout << ns[j] << ' ' << format_double(mean) << ' ' << format_double(se) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence rates of Riemann sums against fractional Brownian motion"};
  app.require_subcommand(1);
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Base seed of the random streams");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress progress messages");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate-paths", "Sample fBm paths and write them as CSV");
  sim_cmd->add_option("--hurst", sim.hurst, "Hurst parameter in (0, 1)")->required();
  sim_cmd->add_option("--steps", sim.steps, "Grid steps N (grid t_i = i/N)")->required();
  sim_cmd->add_option("--count", sim.count, "Number of paths");
  sim_cmd->add_option("--method", sim.method, "cholesky | circulant | independent");
  sim_cmd->add_option("--out", sim.out, "Output CSV")->required();

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate-rate", "Run a Monte Carlo rate experiment");
  est_cmd->add_option("--config", est.config, "Experiment config (JSON)")->required();
  est_cmd->add_option("--out", est.out, "Results JSON")->required();

  CrossingArgs cr;
  auto* cr_cmd = app.add_subcommand("crossing-bound", "Sweep crossing probabilities against their bound");
  cr_cmd->add_option("--hurst", cr.hurst, "Hurst parameter, 1/2 or in (1/2, 1)")->required();
  cr_cmd->add_option("--s-grid", cr.s_grid, "Grid of s: comma list or lo:hi:count");
  cr_cmd->add_option("--t-grid", cr.t_grid, "Grid of t: comma list or lo:hi:count");
  cr_cmd->add_option("--a-grid", cr.a_grid, "Grid of levels a: comma list or lo:hi:count");
  cr_cmd->add_option("--quadrature-points", cr.quadrature_points, "Gauss-Legendre points per panel (>= 32)");
  cr_cmd->add_option("--out", cr.out, "Output CSV")->required();

  BesovArgs bv;
  auto* bv_cmd = app.add_subcommand("besov", "Besov seminorms of a sampled path");
  bv_cmd->add_option("--input", bv.input, "Path CSV (simulate-paths output or one value per line)")->required();
  bv_cmd->add_option("--beta", bv.beta, "Order beta in (0, 1)")->required();
  bv_cmd->add_option("--path-id", bv.path_id, "Which path of a multi-path CSV");
  bv_cmd->add_option("--out", bv.out, "Write the report here instead of stdout");

  VerifyArgs vf;
  auto* vf_cmd = app.add_subcommand("verify-ito", "Empirical L1 error of Riemann sums against the chain rule");
  vf_cmd->add_option("--hurst", vf.hurst, "Hurst parameter in (1/2, 1)")->required();
  vf_cmd->add_option("--steps", vf.steps, "Fine grid size (power of two)")->required();
  vf_cmd->add_option("--paths", vf.paths, "Number of paths")->required();
  vf_cmd->add_option("--integrand", vf.integrand, "Integrand JSON")->required();
  vf_cmd->add_option("--method", vf.method, "cholesky | circulant");

  for (auto* sub : {sim_cmd, est_cmd, cr_cmd, bv_cmd, vf_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*sim_cmd) return run_simulate(g, sim);
    if (*est_cmd) return run_estimate(g, est);
    if (*cr_cmd) return run_crossing(g, cr);
    if (*bv_cmd) return run_besov(g, bv);
    if (*vf_cmd) return run_verify(g, vf);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const QuadratureError& e) {
    std::cerr << "internal error: " << e.what() << " (estimate " << e.estimate() << ", error estimate "
              << e.error_estimate() << ")\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
