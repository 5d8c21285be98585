#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "fbmrate/errors.hpp"

namespace fbmrate {

// Standard normal upper tail P(Z > x), accurate in the far tail.
inline double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Pairwise (cascade) summation; the result depends only on the order of
// the input, never on how the input was produced.
inline double pairwise_sum(std::span<const double> xs) noexcept {
  constexpr std::size_t kBlock = 32;
  if (xs.size() <= kBlock) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// Newton iteration on the Legendre recurrence.
inline GaussLegendreRule make_gauss_legendre(int points) {
  if (points < 1) throw ValidationError("Gauss-Legendre rule needs at least one point");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (points == 1) {
        p1 = x;
        p0 = 1.0;
      }
      derivative = points * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= points; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    derivative = points * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(points - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (points % 2 == 1) rule.nodes[static_cast<std::size_t>(points / 2)] = 0.0;
  return rule;
}

// Rules are cached per order; the cache is shared between threads.
inline const GaussLegendreRule& gauss_legendre(int points) {
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, make_gauss_legendre(points)).first;
  return it->second;
}

template <class F>
double gauss_legendre_integral(const GaussLegendreRule& rule, F&& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

struct QuadratureResult {
  double value;
  double error_estimate;
  int intervals;
};

// Globally adaptive bisection driven by the difference between a panel and
// its two halves. Throws QuadratureError (carrying the best estimate) if the
// tolerance is not met within `max_intervals` panels.
template <class F>
QuadratureResult adaptive_gauss_legendre(F&& f, double lo, double hi, int points, double abs_tol,
                                         int max_intervals = 4000) {
  const auto& rule = gauss_legendre(points);
  struct Panel {
    double lo, hi, value;
  };
  std::vector<Panel> pending{{lo, hi, gauss_legendre_integral(rule, f, lo, hi)}};
  double accepted = 0.0;
  double accepted_error = 0.0;
  int intervals = 1;
  while (!pending.empty()) {
    const Panel panel = pending.back();
    pending.pop_back();
    const double mid = 0.5 * (panel.lo + panel.hi);
    const double left = gauss_legendre_integral(rule, f, panel.lo, mid);
    const double right = gauss_legendre_integral(rule, f, mid, panel.hi);
    const double diff = std::abs(left + right - panel.value);
    const double share = abs_tol * (panel.hi - panel.lo) / (hi - lo);
    if (diff <= share || mid == panel.lo || mid == panel.hi) {
      accepted += left + right;
      accepted_error += diff;
      continue;
    }
    intervals += 1;
    if (intervals > max_intervals) {
      double estimate = accepted + left + right;
      for (const auto& p : pending) estimate += p.value;
      throw QuadratureError("adaptive quadrature did not reach the requested accuracy", estimate,
                            accepted_error + diff);
    }
    pending.push_back({mid, panel.hi, right});
    pending.push_back({panel.lo, mid, left});
  }
  return {accepted, accepted_error, intervals};
}

}  // namespace fbmrate
