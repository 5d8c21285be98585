#pragma once

// Left-point Riemann sums on strided sub-grids of one fine path, and the
// exact (or reference) value of the limiting integral.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "fbmrate/crossing.hpp"
#include "fbmrate/errors.hpp"
#include "fbmrate/fbm.hpp"
#include "fbmrate/integrand.hpp"
#include "fbmrate/numerics.hpp"

namespace fbmrate {

enum class OracleKind { ItoPathwise, FineGridReference, IsometryExact };

inline std::string_view to_string(OracleKind k) {
  switch (k) {
    case OracleKind::ItoPathwise: return "ito_pathwise";
    case OracleKind::FineGridReference: return "fine_grid_reference";
    case OracleKind::IsometryExact: return "isometry_exact";
  }
  return "unknown";
}

struct DiscretizationResult {
  std::size_t n;
  double sum_value;
  double oracle_value;
  double error;  // sum_value - oracle_value
  OracleKind oracle_kind;

  static DiscretizationResult make(std::size_t n, double sum, double oracle, OracleKind kind) {
    return {n, sum, oracle, sum - oracle, kind};
  }
};

inline std::size_t stride_for(std::size_t fine_steps, std::size_t n) {
  if (n == 0) throw ValidationError("n must be positive");
  if (fine_steps % n != 0) {
    throw GridMismatchError("n = " + std::to_string(n) + " does not divide the path grid size " +
                            std::to_string(fine_steps));
  }
  return fine_steps / n;
}

// sum_{i=1}^n g(X_{(i-1)/n}) (X_{i/n} - X_{(i-1)/n}), reading the path at
// exact grid points only.
template <class G>
double riemann_sum(std::span<const double> values, std::size_t n, G&& g) {
  if (values.size() < 2) throw ValidationError("path must have at least one step");
  const std::size_t stride = stride_for(values.size() - 1, n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = values[i * stride];
    acc += g(left) * (values[(i + 1) * stride] - left);
  }
  return acc;
}

// Convex case: g = f'_- (or f itself when use_left_derivative is false).
inline double riemann_sum(std::span<const double> values, const ConvexSpec& spec, std::size_t n,
                          bool use_left_derivative = true) {
  if (use_left_derivative) return riemann_sum(values, n, [&](double x) { return spec.left_derivative(x); });
  return riemann_sum(values, n, [&](double x) { return spec.value(x); });
}

inline double riemann_sum(std::span<const double> values, const LipschitzSpec& spec, std::size_t n) {
  return riemann_sum(values, n, [&](double x) { return spec.value(x); });
}

// f(X_1) - f(X_0): the pathwise chain rule, exact for H > 1/2. Also valid
// for geometric paths X = exp(B), whose first value is 1.
inline double ito_oracle(std::span<const double> values, const ConvexSpec& spec, HurstParam hurst) {
  if (hurst.is_brownian() || !(hurst.value() > 0.5)) {
    throw ContractViolation("the pathwise chain rule is not the limit for H <= 1/2 (got H = " +
                            std::to_string(hurst.value()) + "); use a fine-grid or isometry oracle");
  }
  return spec.value(values.back()) - spec.value(values.front());
}

inline double ito_oracle(const FbmPath& path, const ConvexSpec& spec) {
  return ito_oracle(path.values(), spec, path.hurst());
}

inline double ito_oracle(std::span<const double> values, const LipschitzSpec& spec, HurstParam hurst) {
  if (hurst.is_brownian() || !(hurst.value() > 0.5)) {
    throw ContractViolation("the pathwise chain rule is not the limit for H <= 1/2");
  }
  return spec.antiderivative(values.back()) - spec.antiderivative(values.front());
}

inline constexpr std::size_t kReferenceRefinement = 64;

inline void check_reference_resolution(std::size_t n_ref, std::size_t max_n) {
  if (n_ref < kReferenceRefinement * max_n) {
    throw ValidationError("fine-grid reference too coarse: need N_ref >= 64 * max(n) = " +
                          std::to_string(kReferenceRefinement * max_n) + ", got " + std::to_string(n_ref));
  }
}

// Fine-grid proxy for the Ito integral of a Brownian path: the Riemann sum
// at the finest resolution.
inline double bm_reference(std::span<const double> values, const ConvexSpec& spec, std::size_t n_ref,
                           std::size_t max_n) {
  if (values.size() != n_ref + 1) throw GridMismatchError("reference must use the full path grid");
  check_reference_resolution(n_ref, max_n);
  return riemann_sum(values, spec, n_ref);
}

inline double bm_reference(std::span<const double> values, const LipschitzSpec& spec, std::size_t n_ref,
                           std::size_t max_n) {
  if (values.size() != n_ref + 1) throw GridMismatchError("reference must use the full path grid");
  check_reference_resolution(n_ref, max_n);
  return riemann_sum(values, spec, n_ref);
}

// Exact L2 distance between the n-step sum and the Ito integral of
// f = (x - a)^+ against Brownian motion. By the isometry the squared norm
// is the time integral of P(the indicator 1{W > a} differs between the
// left grid point and t), integrated with `quadrature_points` Gauss-Legendre
// nodes per step after the substitution t = t_{i-1} + h v^2, which removes
// the square-root behaviour at the left end.
inline double isometry_error_norm(std::size_t n, double a, int quadrature_points) {
  if (n == 0) throw ValidationError("n must be positive");
  if (quadrature_points < 4) throw ValidationError("isometry quadrature needs at least 4 points");
  const HurstParam half(0.5);
  const auto& rule = gauss_legendre(quadrature_points);
  const double h = 1.0 / static_cast<double>(n);
  const int inner_points = std::max(kMinCrossingQuadraturePoints, quadrature_points);

  std::vector<double> per_step(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = static_cast<double>(i) * h;
    auto p = [&](double t) {
      if (!(t > left)) return 0.0;
      if (i == 0) {
        // W_0 = 0 sits on one side of the level deterministically.
        return a >= 0.0 ? normal_sf(a / std::sqrt(t)) : normal_cdf(a / std::sqrt(t));
      }
      const CrossingQuery q(left, std::min(t, 1.0), a, half);
      return crossing_probability(q, inner_points) + crossing_probability_reflected(q, inner_points);
    };
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double v = 0.5 * (rule.nodes[k] + 1.0);
      acc += 0.5 * rule.weights[k] * p(left + h * v * v) * 2.0 * h * v;
    }
    per_step[i] = acc;
  }
  return std::sqrt(pairwise_sum(per_step));
}

}  // namespace fbmrate
