#pragma once

// Independent oracles shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fbmrate/crossing.hpp"
#include "fbmrate/fbm.hpp"
#include "fbmrate/random.hpp"

namespace fbmrate::test_support {

struct McEstimate {
  double mean;
  double stderr_;
};

// P(B_t > a > B_s) by drawing (B_s, B_t) from the 2x2 Cholesky factor of
// their covariance.
inline McEstimate crossing_mc(double s, double t, double a, HurstParam h, std::size_t draws, std::uint64_t seed) {
  const double css = fbm_covariance(s, s, h);
  const double cts = fbm_covariance(t, s, h);
  const double ctt = fbm_covariance(t, t, h);
  const double l11 = std::sqrt(css);
  const double l21 = cts / l11;
  const double l22 = std::sqrt(std::max(ctt - l21 * l21, 0.0));
  RandomStream rng(seed, 0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double bs = l11 * z1;
    const double bt = l21 * z1 + l22 * z2;
    if (bt > a && bs < a) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(draws);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(draws))};
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

// Critical KS coefficient c(alpha) = sqrt(-ln(alpha/2)/2) at alpha = 1e-3.
inline constexpr double kKsCritical1e3 = 1.9495;

inline double ks_critical(std::size_t n, std::size_t m) {
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  return kKsCritical1e3 * std::sqrt((nd + md) / (nd * md));
}

// Least-squares slope of log(err) on log(n) (for convergence orders).
inline double loglog_slope(std::span<const double> n, std::span<const double> err) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    mx += std::log(n[i]);
    my += std::log(err[i]);
  }
  mx /= static_cast<double>(n.size());
  my /= static_cast<double>(n.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double dx = std::log(n[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace fbmrate::test_support
