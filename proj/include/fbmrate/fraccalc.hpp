#pragma once

// Riemann-Liouville integrals and Weyl-form derivatives of sampled
// functions. Every function is reconstructed piecewise linearly between
// grid points and every singular kernel is integrated exactly on each cell.
//
// Conventions, for a grid of spacing h and order g in (0, 1):
//   a_m = int_m^{m+1} v^{-1-g} dv,  b_m = int_m^{m+1} (v - m) v^{-1-g} dv
// so that int over cell m of (d_near + (d_far - d_near)(v - m)) v^{-1-g}
// equals d_near a_m + (d_far - d_near) b_m (a_0 is infinite; it always
// multiplies d_near = 0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fbmrate/errors.hpp"
#include "fbmrate/fbm.hpp"
#include "fbmrate/numerics.hpp"
#include "fbmrate/parallel.hpp"

namespace fbmrate {

class SampledFunction {
 public:
  SampledFunction(std::vector<double> values, double horizon = 1.0)
      : values_(std::move(values)), horizon_(horizon) {
    if (values_.size() < 3) throw ValidationError("sampled function needs at least N = 2 cells");
    if (!(horizon_ > 0.0)) throw ValidationError("horizon must be positive");
  }

  template <class F>
  static SampledFunction from(F&& f, std::size_t cells, double horizon = 1.0) {
    std::vector<double> v(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) v[i] = f(horizon * static_cast<double>(i) / static_cast<double>(cells));
    return SampledFunction(std::move(v), horizon);
  }

  std::size_t cells() const noexcept { return values_.size() - 1; }
  double horizon() const noexcept { return horizon_; }
  double step() const noexcept { return horizon_ / static_cast<double>(cells()); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double grid(std::size_t i) const { return horizon_ * static_cast<double>(i) / static_cast<double>(cells()); }

  // Index of the grid point at x; refuses points off the grid.
  std::size_t index_of(double x) const {
    const double pos = x / step();
    const double rounded = std::round(pos);
    if (!(rounded >= 0.0 && rounded <= static_cast<double>(cells())) || std::abs(pos - rounded) > 1e-9 * (1.0 + pos)) {
      throw ValidationError("x = " + std::to_string(x) + " is not a grid point");
    }
    return static_cast<std::size_t>(rounded);
  }

 private:
  std::vector<double> values_;
  double horizon_;
};

namespace detail {

// int_{v0}^{v1} v^{-e} dv for e != 1.
inline double power_moment(double v0, double v1, double e) {
  return (std::pow(v1, 1.0 - e) - std::pow(v0, 1.0 - e)) / (1.0 - e);
}

}  // namespace detail

// Tables a_m, b_m for the hypersingular kernel v^{-1-g}.
class WeylKernel {
 public:
  WeylKernel(double order, std::size_t size) : order_(order), a_(size + 1), b_(size + 1) {
    if (!(order > 0.0 && order < 1.0)) throw ValidationError("fractional order must lie in (0, 1)");
    const double g = order;
    a_[0] = std::numeric_limits<double>::infinity();
    b_[0] = 1.0 / (1.0 - g);
    // Closed forms cancel badly for large m; the integrands are smooth
    // there, so a short Gauss-Legendre rule is exact to roundoff.
    const auto& rule = gauss_legendre(12);
    for (std::size_t m = 1; m <= size; ++m) {
      const double md = static_cast<double>(m);
      if (m < 8) {
        a_[m] = (std::pow(md, -g) - std::pow(md + 1.0, -g)) / g;
        b_[m] = detail::power_moment(md, md + 1.0, g) - md * a_[m];
      } else {
        double sa = 0.0, sb = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          const double u = 0.5 * (rule.nodes[k] + 1.0);
          const double kern = std::pow(md + u, -1.0 - g);
          sa += rule.weights[k] * kern;
          sb += rule.weights[k] * u * kern;
        }
        a_[m] = 0.5 * sa;
        b_[m] = 0.5 * sb;
      }
    }
  }

  double order() const noexcept { return order_; }
  double a(std::size_t m) const { return a_[m]; }
  double b(std::size_t m) const { return b_[m]; }

  // int over cell m of (d0 + (d1 - d0)(v - m)) v^{-1-g} dv.
  double cell(std::size_t m, double d0, double d1) const {
    return (m == 0 ? 0.0 : d0 * a_[m]) + (d1 - d0) * b_[m];
  }

  // Same with |.| applied to the linear function; splits at a sign change.
  double abs_cell(std::size_t m, double d0, double d1) const {
    if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) {
      const double s = (d0 + d1 >= 0.0) ? 1.0 : -1.0;
      return cell(m, s * d0, s * d1);
    }
    // Sign change strictly inside the cell; d0 != 0 so m > 0.
    const double md = static_cast<double>(m);
    const double root = md + d0 / (d0 - d1);
    const double g = order_;
    auto linear_part = [&](double v0, double v1) {
      // int (d0 + (d1 - d0)(v - m)) v^{-1-g} dv over [v0, v1]
      const double k0 = detail::power_moment(v0, v1, 1.0 + g);
      const double k1 = detail::power_moment(v0, v1, g);
      return (d0 - (d1 - d0) * md) * k0 + (d1 - d0) * k1;
    };
    return std::abs(linear_part(md, root)) + std::abs(linear_part(root, md + 1.0));
  }

 private:
  double order_;
  std::vector<double> a_, b_;
};

// Tables for the weakly singular kernel v^{-e}, e in (0, 1):
//   c_j = int_j^{j+1} v^{-e} dv,  e_j = int_j^{j+1} (v - j) v^{-e} dv.
class PowerKernel {
 public:
  PowerKernel(double exponent, std::size_t size) : exponent_(exponent), c_(size), e_(size) {
    if (!(exponent > 0.0 && exponent < 1.0)) throw ValidationError("kernel exponent must lie in (0, 1)");
    const double x = exponent;
    const auto& rule = gauss_legendre(12);
    for (std::size_t j = 0; j < size; ++j) {
      const double jd = static_cast<double>(j);
      if (j < 8) {
        c_[j] = detail::power_moment(jd, jd + 1.0, x);
        e_[j] = (std::pow(jd + 1.0, 2.0 - x) - std::pow(jd, 2.0 - x)) / (2.0 - x) - jd * c_[j];
      } else {
        double sc = 0.0, se = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          const double u = 0.5 * (rule.nodes[k] + 1.0);
          const double kern = std::pow(jd + u, -x);
          sc += rule.weights[k] * kern;
          se += rule.weights[k] * u * kern;
        }
        c_[j] = 0.5 * sc;
        e_[j] = 0.5 * se;
      }
    }
  }

  // int over cell j of (q0 + (q1 - q0)(v - j)) v^{-e} dv.
  double cell(std::size_t j, double q0, double q1) const { return q0 * c_[j] + (q1 - q0) * e_[j]; }

  double abs_cell(std::size_t j, double q0, double q1) const {
    if ((q0 >= 0.0 && q1 >= 0.0) || (q0 <= 0.0 && q1 <= 0.0)) return std::abs(cell(j, q0, q1));
    const double jd = static_cast<double>(j);
    const double root = jd + q0 / (q0 - q1);
    const double x = exponent_;
    auto linear_part = [&](double v0, double v1) {
      const double k0 = detail::power_moment(v0, v1, x);
      const double k1 = detail::power_moment(v0, v1, x - 1.0);
      return (q0 - (q1 - q0) * jd) * k0 + (q1 - q0) * k1;
    };
    return std::abs(linear_part(jd, root)) + std::abs(linear_part(root, jd + 1.0));
  }

 private:
  double exponent_;
  std::vector<double> c_, e_;
};

inline void check_order(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("fractional order must lie in (0, 1), got " + std::to_string(beta));
}

// (I^beta_{0+} f)(s_k) = 1/Gamma(beta) int_0^s f(u) (s - u)^{beta - 1} du.
inline double frac_integral_left_at(const SampledFunction& f, double beta, std::size_t k) {
  check_order(beta);
  const double h = f.step();
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double w0 = static_cast<double>(k - j) * h;
    const double w1 = static_cast<double>(k - j - 1) * h;
    const double wa = (std::pow(w0, beta) - std::pow(w1, beta)) / beta;
    const double wb = (std::pow(w0, beta + 1.0) - std::pow(w1, beta + 1.0)) / (beta + 1.0) - w1 * wa;
    acc += f[j + 1] * wa + (f[j] - f[j + 1]) * wb / h;
  }
  return acc / std::tgamma(beta);
}

inline double frac_integral_left(const SampledFunction& f, double beta, double s) {
  return frac_integral_left_at(f, beta, f.index_of(s));
}

// The whole function I^beta f on the grid.
inline SampledFunction frac_integral_left(const SampledFunction& f, double beta) {
  std::vector<double> out(f.cells() + 1);
  for (std::size_t k = 0; k <= f.cells(); ++k) out[k] = frac_integral_left_at(f, beta, k);
  return SampledFunction(std::move(out), f.horizon());
}

// Weyl form: 1/Gamma(1-beta) (f(x) x^{-beta} + beta int_0^x (f(x)-f(y)) (x-y)^{-beta-1} dy).
inline double frac_derivative_left_at(const SampledFunction& f, const WeylKernel& kernel, std::size_t k) {
  const double beta = kernel.order();
  if (k == 0) throw DomainError("left fractional derivative is undefined at x = 0");
  const double h = f.step();
  const double fk = f[k];
  double acc = 0.0;
  for (std::size_t m = 0; m < k; ++m) acc += kernel.cell(m, fk - f[k - m], fk - f[k - m - 1]);
  const double x = f.grid(k);
  return (fk * std::pow(x, -beta) + beta * std::pow(h, -beta) * acc) / std::tgamma(1.0 - beta);
}

inline double frac_derivative_left(const SampledFunction& f, double beta, double x) {
  check_order(beta);
  const std::size_t k = f.index_of(x);
  if (k == 0) throw DomainError("left fractional derivative is undefined at x = 0");
  return frac_derivative_left_at(f, WeylKernel(beta, k), k);
}

// Right-sided Weyl derivative of the centred function g_{t-} = g - g(t) on [0, t]:
// 1/Gamma(1-beta) (g_{t-}(x) (t-x)^{-beta} + beta int_x^t (g(x)-g(y)) (y-x)^{-beta-1} dy).
inline double frac_derivative_right_at(const SampledFunction& g, const WeylKernel& kernel, std::size_t i,
                                       std::size_t k) {
  const double beta = kernel.order();
  if (i >= k) throw DomainError("right fractional derivative needs x < t");
  const double h = g.step();
  const double gi = g[i];
  double acc = 0.0;
  for (std::size_t m = 0; m < k - i; ++m) acc += kernel.cell(m, gi - g[i + m], gi - g[i + m + 1]);
  const double span = static_cast<double>(k - i) * h;
  return ((gi - g[k]) * std::pow(span, -beta) + beta * std::pow(h, -beta) * acc) / std::tgamma(1.0 - beta);
}

inline double frac_derivative_right(const SampledFunction& g, double beta, double x, double t) {
  check_order(beta);
  const std::size_t i = g.index_of(x);
  const std::size_t k = g.index_of(t);
  if (i >= k) throw DomainError("right fractional derivative needs x < t");
  return frac_derivative_right_at(g, WeylKernel(beta, k - i), i, k);
}

// sup over grid pairs s < t' <= t_end of |D^{order}_{t'-} g_{t'-}(s)|. For
// each s the singular integral is accumulated while t' moves right, so the
// whole sweep costs O(N^2).
inline double sup_right_derivative(const SampledFunction& g, const WeylKernel& kernel, std::size_t t_end) {
  const double order = kernel.order();
  const double h = g.step();
  const double hpow = std::pow(h, -order);
  const double inv_gamma = 1.0 / std::tgamma(1.0 - order);
  double sup = 0.0;
  for (std::size_t i = 0; i < t_end; ++i) {
    const double gi = g[i];
    double acc = 0.0;
    for (std::size_t k = i + 1; k <= t_end; ++k) {
      const std::size_t m = k - i - 1;
      acc += kernel.cell(m, gi - g[k - 1], gi - g[k]);
      const double span = static_cast<double>(k - i) * h;
      const double value = ((gi - g[k]) * std::pow(span, -order) + order * hpow * acc) * inv_gamma;
      sup = std::max(sup, std::abs(value));
    }
  }
  return sup;
}

// ||f||_{1,b} = sup_{s<t} |f(t)-f(s)| (t-s)^{-b} + int_s^t |f(y)-f(s)| (y-s)^{-1-b} dy.
inline double besov_norm_1(const SampledFunction& f, const WeylKernel& kernel, std::size_t t_end) {
  const double b = kernel.order();
  const double h = f.step();
  const double hpow = std::pow(h, -b);
  double sup = 0.0;
  for (std::size_t i = 0; i < t_end; ++i) {
    const double fi = f[i];
    double acc = 0.0;
    for (std::size_t k = i + 1; k <= t_end; ++k) {
      const std::size_t m = k - i - 1;
      acc += kernel.abs_cell(m, f[k - 1] - fi, f[k] - fi);
      const double span = static_cast<double>(k - i) * h;
      sup = std::max(sup, std::abs(f[k] - fi) * std::pow(span, -b) + hpow * acc);
    }
  }
  return sup;
}

// Inner integral of ||f||_{2,b} at s_k: int_0^s |f(s)-f(u)| (s-u)^{-1-b} du.
inline double besov_inner_2(const SampledFunction& f, const WeylKernel& kernel, std::size_t k) {
  const double fk = f[k];
  double acc = 0.0;
  for (std::size_t m = 0; m < k; ++m) acc += kernel.abs_cell(m, fk - f[k - m], fk - f[k - m - 1]);
  return std::pow(f.step(), -kernel.order()) * acc;
}

// ||f||_{2,b} on [0, t_end] = int |f(s)| s^{-b} ds + int_0^t int_0^s |f(s)-f(u)| (s-u)^{-1-b} du ds.
// The outer integral of the double integral is a trapezoid rule over the
// exactly computed inner integrals.
inline double besov_norm_2(const SampledFunction& f, const WeylKernel& kernel, const PowerKernel& power,
                           std::size_t t_end) {
  const double b = kernel.order();
  const double h = f.step();
  double first = 0.0;
  for (std::size_t j = 0; j < t_end; ++j) first += power.abs_cell(j, f[j], f[j + 1]);
  first *= std::pow(h, 1.0 - b);
  std::vector<double> inner(t_end + 1);
  for (std::size_t k = 0; k <= t_end; ++k) inner[k] = besov_inner_2(f, kernel, k);
  double second = 0.0;
  for (std::size_t k = 0; k < t_end; ++k) second += 0.5 * h * (inner[k] + inner[k + 1]);
  return first + second;
}

struct BesovReport {
  double beta;
  double norm_1beta;
  double norm_2beta;
  double sup_frac_derivative;  // sup_{s<t} |D^{1-beta}_{t-} f_{t-}(s)| over grid pairs
};

inline BesovReport besov_norms(const SampledFunction& f, double beta) {
  check_order(beta);
  const std::size_t n = f.cells();
  const WeylKernel kernel(beta, n);
  const PowerKernel power(beta, n);
  const WeylKernel dual(1.0 - beta, n);
  return {beta, besov_norm_1(f, kernel, n), besov_norm_2(f, kernel, power, n), sup_right_derivative(f, dual, n)};
}

struct GlsResult {
  double value;
  double certificate;
};

inline constexpr double kCertificateSlack = 1e-8;

// Generalized Lebesgue-Stieltjes integral
//   int_0^t f dg = - int_0^t (D^beta_{0+} f)(x) (D^{1-beta}_{t-} g_{t-})(x) dx,
// where the sign is the product (-1)^beta (-1)^{1-beta} of the right-sided
// Weyl factors. Writing Q(x) = x^beta D^beta f(x) D^{1-beta} g(x), which is
// bounded, Q is interpolated linearly and integrated against x^{-beta}
// exactly. Returns the value with the bound sup|D^{1-beta} g| ||f||_{2,beta}
// and throws ConsistencyError if the bound fails beyond roundoff slack.
inline GlsResult gls_integral(const SampledFunction& f, const SampledFunction& g, double beta, double t) {
  check_order(beta);
  if (f.cells() != g.cells() || f.horizon() != g.horizon()) throw GridMismatchError("f and g must share a grid");
  const std::size_t k_end = g.index_of(t);
  if (k_end == 0) return {0.0, 0.0};
  const WeylKernel left_kernel(beta, k_end);
  const WeylKernel right_kernel(1.0 - beta, k_end);
  const PowerKernel power(beta, k_end);

  std::vector<double> q(k_end + 1, 0.0);
  const double inv_gamma = 1.0 / std::tgamma(1.0 - beta);
  q[0] = f[0] * inv_gamma * frac_derivative_right_at(g, right_kernel, 0, k_end);
  for (std::size_t k = 1; k < k_end; ++k) {
    const double x = f.grid(k);
    q[k] = std::pow(x, beta) * frac_derivative_left_at(f, left_kernel, k) *
           frac_derivative_right_at(g, right_kernel, k, k_end);
  }
  q[k_end] = 0.0;  // D^{1-beta}_{t-} g_{t-} vanishes at t for Hoelder g
  double acc = 0.0;
  for (std::size_t j = 0; j < k_end; ++j) acc += power.cell(j, q[j], q[j + 1]);
  const double value = -std::pow(f.step(), 1.0 - beta) * acc;

  const double certificate =
      sup_right_derivative(g, right_kernel, k_end) * besov_norm_2(f, left_kernel, power, k_end);
  if (std::abs(value) > certificate * (1.0 + kCertificateSlack) + 1e-300) {
    throw ConsistencyError("GLS bound violated: |integral| = " + std::to_string(std::abs(value)) +
                           " > sup|D^{1-beta} g| * ||f||_{2,beta} = " + std::to_string(certificate));
  }
  return {value, certificate};
}

// Monte Carlo estimate of E (sup_{s<t} |D^{1-beta}_{t-} B_{t-}(s)|)^p over
// fBm paths on an n_steps grid.
inline double sup_frac_derivative_moments(HurstParam hurst, double beta, double p_moment, std::size_t n_paths,
                                          std::size_t n_steps = 1024, std::uint64_t seed = 0, unsigned threads = 1) {
  check_order(beta);
  if (p_moment == 0.0) return 1.0;
  if (n_paths == 0) throw ValidationError("need at least one path");
  const CirculantSampler sampler(hurst, n_steps);
  const WeylKernel dual(1.0 - beta, n_steps);
  std::vector<double> moments(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t k) {
    std::vector<double> path(n_steps + 1);
    RandomStream rng(seed, k);
    sampler.sample_into(rng, path);
    const SampledFunction g(std::move(path));
    moments[k] = std::pow(sup_right_derivative(g, dual, n_steps), p_moment);
  });
  return pairwise_sum(moments) / static_cast<double>(n_paths);
}

}  // namespace fbmrate
