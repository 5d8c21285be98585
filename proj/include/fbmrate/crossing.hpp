#pragma once

// Level-crossing probabilities P(B_t > a > B_s) for fBm, computed from the
// regression B_t = slope * B_s + sigma * Y with Y independent of B_s.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "fbmrate/errors.hpp"
#include "fbmrate/fbm.hpp"
#include "fbmrate/integrand.hpp"
#include "fbmrate/numerics.hpp"
#include "fbmrate/parallel.hpp"

namespace fbmrate {

struct CrossingQuery {
  double s;
  double t;
  double a;
  HurstParam hurst;

  CrossingQuery(double s_, double t_, double a_, HurstParam h) : s(s_), t(t_), a(a_), hurst(h) {
    if (!(s > 0.0 && s <= t && t <= 1.0)) {
      throw ValidationError("crossing query needs 0 < s <= t <= 1, got s = " + std::to_string(s) +
                            ", t = " + std::to_string(t));
    }
    if (!std::isfinite(a)) throw ValidationError("crossing level must be finite");
  }

  CrossingQuery reflected() const { return {s, t, -a, hurst}; }
};

struct CrossingResult {
  double probability;
  double bound_value;
  double ratio;
};

struct ConditionalDecomposition {
  double slope;
  double sigma;
};

inline constexpr double kVarianceClipTolerance = 1e-12;
inline constexpr int kMinCrossingQuadraturePoints = 32;
inline constexpr double kCrossingAbsTolerance = 1e-10;

inline ConditionalDecomposition conditional_decomposition(const CrossingQuery& q) {
  const double rss = fbm_covariance(q.s, q.s, q.hurst);
  const double rts = fbm_covariance(q.t, q.s, q.hurst);
  const double rtt = fbm_covariance(q.t, q.t, q.hurst);
  if (q.t == q.s) return {1.0, 0.0};
  const double slope = q.hurst.is_brownian() ? 1.0 : rts / rss;
  double var = q.hurst.is_brownian() ? q.t - q.s : (rtt * rss - rts * rts) / rss;
  if (var < -kVarianceClipTolerance) {
    throw ConsistencyError("conditional variance is negative (" + std::to_string(var) + ")");
  }
  var = std::max(var, 0.0);
  return {slope, std::sqrt(var)};
}

// P(B_t > a > B_s).
inline double crossing_probability(const CrossingQuery& q,
                                   int quadrature_points = kMinCrossingQuadraturePoints) {
  if (quadrature_points < kMinCrossingQuadraturePoints) {
    throw ValidationError("crossing quadrature needs at least " +
                          std::to_string(kMinCrossingQuadraturePoints) + " points");
  }
  const auto [slope, sigma] = conditional_decomposition(q);
  const double sd_s = std::pow(q.s, q.hurst.value());
  const double a = q.a;
  if (sigma == 0.0) {
    // B_t = slope * B_s: the event is a < slope * B_s and B_s < a.
    return std::max(0.0, normal_cdf(a / sd_s) - normal_cdf(a / (slope * sd_s)));
  }
  // u = B_s / s^H is standard normal; truncate where either factor is
  // below 1e-22 relative to its peak.
  const double upper = a / sd_s;
  const double lower = std::max(-10.0, (a - 40.0 * sigma) / (slope * sd_s));
  if (!(lower < upper)) return 0.0;
  auto integrand = [&](double u) { return normal_sf((a - slope * sd_s * u) / sigma) * normal_pdf(u); };
  const auto r = adaptive_gauss_legendre(integrand, lower, upper, quadrature_points, kCrossingAbsTolerance);
  return std::clamp(r.value, 0.0, 1.0);
}

// P(B_t < a < B_s), by the symmetry B -> -B.
inline double crossing_probability_reflected(const CrossingQuery& q,
                                             int quadrature_points = kMinCrossingQuadraturePoints) {
  return crossing_probability(q.reflected(), quadrature_points);
}

// C(a) (t - s)^H s^{-2H} for H > 1/2; for Brownian motion the sharper
// exp(-min(a^2, (a-1)^2) / 2) sqrt((t - s) / s).
inline double crossing_bound(const CrossingQuery& q) {
  const double h = q.hurst.value();
  if (q.hurst.is_brownian()) {
    const double m = std::min(q.a * q.a, (q.a - 1.0) * (q.a - 1.0));
    return std::exp(-0.5 * m) * std::sqrt((q.t - q.s) / q.s);
  }
  return constant_C(q.a) * std::pow(q.t - q.s, h) * std::pow(q.s, -2.0 * h);
}

inline CrossingResult crossing_result(const CrossingQuery& q,
                                      int quadrature_points = kMinCrossingQuadraturePoints) {
  const double p = crossing_probability(q, quadrature_points);
  const double bound = crossing_bound(q);
  if (!(bound > 0.0)) throw DomainError("crossing bound vanishes for t = s");
  return {p, bound, p / bound};
}

struct SweepEntry {
  double s, t, a;
  CrossingResult result;
};

struct SweepResult {
  double max_ratio = 0.0;
  CrossingQuery argmax{0.5, 1.0, 0.0, HurstParam(0.5)};
  std::vector<SweepEntry> entries;  // grid order: s outer, then t, then a
};

// Pairs with t <= s carry no crossing event and are skipped.
inline constexpr double kSweepMinGap = 1e-12;

inline SweepResult bound_ratio_sweep(HurstParam hurst, std::span<const double> s_grid,
                                     std::span<const double> t_grid, std::span<const double> a_grid,
                                     int quadrature_points = kMinCrossingQuadraturePoints,
                                     unsigned threads = 1) {
  if (s_grid.empty() || t_grid.empty() || a_grid.empty()) throw ValidationError("sweep grids must be nonempty");
  std::vector<CrossingQuery> queries;
  for (double s : s_grid) {
    for (double t : t_grid) {
      // Grids built independently put rounding-level gaps where s == t was
      // meant; those pairs are outside the bound's domain too.
      if (!(t - s > kSweepMinGap)) continue;
      for (double a : a_grid) queries.emplace_back(s, t, a, hurst);
    }
  }
  if (queries.empty()) throw ValidationError("sweep grids contain no pair with s < t");
  std::vector<CrossingResult> results(queries.size());
  parallel_for(queries.size(), threads,
               [&](std::size_t i) { results[i] = crossing_result(queries[i], quadrature_points); });

  SweepResult out;
  out.entries.reserve(queries.size());
  bool first = true;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out.entries.push_back({queries[i].s, queries[i].t, queries[i].a, results[i]});
    if (first || results[i].ratio > out.max_ratio) {
      out.max_ratio = results[i].ratio;
      out.argmax = queries[i];
      first = false;
    }
  }
  return out;
}

// (1 - R(s,s)/R(t,s)) / ((t - s)^H s^{-H})
inline double lemma_a1_ratio(double s, double t, HurstParam hurst) {
  if (!(s > 0.0 && s <= t && t <= 1.0)) throw ValidationError("need 0 < s <= t <= 1");
  hurst.require_above_half("lemma_a1_ratio");
  if (t == s) return 0.0;
  const double rss = fbm_covariance(s, s, hurst);
  const double rts = fbm_covariance(t, s, hurst);
  const double numerator = 1.0 - rss / rts;
  if (numerator < -1e-14) throw ConsistencyError("R(s,s) > R(t,s) although H > 1/2");
  const double h = hurst.value();
  return std::max(numerator, 0.0) / (std::pow(t - s, h) * std::pow(s, -h));
}

struct TailBoundCheck {
  double tail;
  double bound;
};

// P(Z > a) against the Mills-ratio bound exp(-a^2/2) / (sqrt(2 pi) a).
inline TailBoundCheck normal_tail_bound_check(double a) {
  if (!(a > 0.0)) throw DomainError("normal tail bound needs a > 0");
  return {normal_sf(a), std::exp(-0.5 * a * a) / (std::sqrt(2.0 * std::numbers::pi) * a)};
}

}  // namespace fbmrate
