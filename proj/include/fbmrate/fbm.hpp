#pragma once

// Exact sampling of fractional Brownian motion on the uniform grid
// t_i = i / n, i = 0..n.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fbmrate/errors.hpp"
#include "fbmrate/random.hpp"

namespace fbmrate {

class HurstParam {
 public:
  explicit HurstParam(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) {
      throw ValidationError("Hurst parameter must lie in (0, 1), got " + std::to_string(value));
    }
  }

  double value() const noexcept { return value_; }
  bool is_brownian() const noexcept { return value_ == 0.5; }

  // Pathwise (Young / generalized Lebesgue-Stieltjes) integration needs H > 1/2.
  void require_above_half(std::string_view context) const {
    if (!(value_ > 0.5)) {
      throw ValidationError(std::string(context) + " requires H > 1/2, got H = " +
                            std::to_string(value_));
    }
  }

  friend bool operator==(HurstParam, HurstParam) = default;

 private:
  double value_;
};

enum class SamplingMethod { Cholesky, CirculantEmbedding, IndependentIncrements };

inline std::string_view to_string(SamplingMethod m) {
  switch (m) {
    case SamplingMethod::Cholesky: return "cholesky";
    case SamplingMethod::CirculantEmbedding: return "circulant";
    case SamplingMethod::IndependentIncrements: return "independent";
  }
  return "unknown";
}

inline SamplingMethod parse_sampling_method(std::string_view name) {
  if (name == "cholesky") return SamplingMethod::Cholesky;
  if (name == "circulant") return SamplingMethod::CirculantEmbedding;
  if (name == "independent") return SamplingMethod::IndependentIncrements;
  throw ValidationError("unknown sampling method '" + std::string(name) + "'");
}

// R(t, s) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
inline double fbm_covariance(double t, double s, HurstParam hurst) {
  if (!(t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0)) {
    throw DomainError("fbm_covariance: time arguments must lie in [0, 1]");
  }
  const double two_h = 2.0 * hurst.value();
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

// Autocovariance of unit-spacing fBm increments (fractional Gaussian noise).
inline double fgn_autocovariance(std::size_t lag, HurstParam hurst) {
  const double two_h = 2.0 * hurst.value();
  const double k = static_cast<double>(lag);
  if (lag == 0) return 1.0;
  return 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(k - 1.0, two_h));
}

// A sampled trajectory. Immutable once built.
class FbmPath {
 public:
  FbmPath(HurstParam hurst, std::vector<double> values, std::uint64_t seed, std::uint64_t stream,
          SamplingMethod method)
      : hurst_(hurst), values_(std::move(values)), seed_(seed), stream_(stream), method_(method) {
    if (values_.size() < 2) throw ValidationError("FbmPath needs at least one step");
    if (values_.front() != 0.0) throw ValidationError("FbmPath must start at 0");
  }

  HurstParam hurst() const noexcept { return hurst_; }
  std::size_t n_steps() const noexcept { return values_.size() - 1; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double terminal() const noexcept { return values_.back(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  SamplingMethod method() const noexcept { return method_; }

 private:
  HurstParam hurst_;
  std::vector<double> values_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  SamplingMethod method_;
};

// Davies-Harte / Wood-Chan sampler. The spectrum of the circulant embedding
// of the increment covariance is computed once and reused for every draw.
class CirculantSampler {
 public:
  static constexpr double kNegativeEigenvalueTolerance = 1e-10;

  CirculantSampler(HurstParam hurst, std::size_t n_steps) : hurst_(hurst), n_(n_steps) {
    if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
    const std::size_t m = 2 * n_;
    std::vector<double> row(m);
    for (std::size_t j = 0; j <= n_; ++j) row[j] = fgn_autocovariance(j, hurst);
    for (std::size_t j = n_ + 1; j < m; ++j) row[j] = row[m - j];

    std::vector<std::complex<double>> spectrum(m / 2 + 1);
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    fft.fwd(spectrum.data(), row.data(), static_cast<Eigen::Index>(m));

    min_eigenvalue_ = spectrum[0].real();
    sqrt_half_spectrum_.resize(m / 2 + 1);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j <= m / 2; ++j) {
      double lambda = spectrum[j].real();
      min_eigenvalue_ = std::min(min_eigenvalue_, lambda);
      if (lambda < -kNegativeEigenvalueTolerance) {
        throw ConsistencyError("circulant embedding is not nonnegative definite: eigenvalue " +
                               std::to_string(lambda));
      }
      lambda = std::max(lambda, 0.0);
      // Interior frequencies pair with their conjugates and carry half the weight.
      const bool self_conjugate = (j == 0 || j == m / 2);
      sqrt_half_spectrum_[j] = std::sqrt(lambda * inv_m * (self_conjugate ? 1.0 : 0.5));
    }
    increment_scale_ = std::pow(static_cast<double>(n_), -hurst.value());
  }

  HurstParam hurst() const noexcept { return hurst_; }
  std::size_t n_steps() const noexcept { return n_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

  // Writes the path B_{i/n}, i = 0..n, into `out` (size n + 1).
  void sample_into(RandomStream& rng, std::span<double> out) const {
    const std::size_t m = 2 * n_;
    thread_local Eigen::FFT<double> fft;
    thread_local std::vector<double> normals;
    thread_local std::vector<std::complex<double>> coeffs;
    thread_local std::vector<double> increments;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    normals.resize(m);
    coeffs.resize(m / 2 + 1);
    increments.resize(m);
    rng.fill_normal(normals);

    coeffs[0] = {sqrt_half_spectrum_[0] * normals[0], 0.0};
    coeffs[m / 2] = {sqrt_half_spectrum_[m / 2] * normals[1], 0.0};
    for (std::size_t j = 1; j < m / 2; ++j) {
      coeffs[j] = {sqrt_half_spectrum_[j] * normals[2 * j], sqrt_half_spectrum_[j] * normals[2 * j + 1]};
    }
    fft.inv(increments.data(), coeffs.data(), static_cast<Eigen::Index>(m));

    out[0] = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      acc += increment_scale_ * increments[i];
      out[i + 1] = acc;
    }
  }

 private:
  HurstParam hurst_;
  std::size_t n_;
  std::vector<double> sqrt_half_spectrum_;
  double min_eigenvalue_ = 0.0;
  double increment_scale_ = 1.0;
};

// O(n^3) reference sampler: Cholesky factor of the full path
// covariance at t_1..t_n.
class CholeskySampler {
 public:
  static constexpr double kPivotTolerance = 1e-14;

  CholeskySampler(HurstParam hurst, std::size_t n_steps) : hurst_(hurst), n_(n_steps) {
    if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
    Eigen::MatrixXd cov(n_, n_);
    const double dt = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double c = fbm_covariance(static_cast<double>(i + 1) * dt, static_cast<double>(j + 1) * dt, hurst);
        cov(i, j) = c;
        cov(j, i) = c;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw ConsistencyError("Cholesky factorization of the fBm covariance failed");
    }
    lower_ = llt.matrixL();
    if (lower_.diagonal().minCoeff() <= kPivotTolerance) {
      throw ConsistencyError("Cholesky factorization hit a non-positive pivot");
    }
  }

  HurstParam hurst() const noexcept { return hurst_; }
  std::size_t n_steps() const noexcept { return n_; }

  void sample_into(RandomStream& rng, std::span<double> out) const {
    thread_local Eigen::VectorXd z;
    z.resize(static_cast<Eigen::Index>(n_));
    rng.fill_normal(std::span<double>(z.data(), n_));
    out[0] = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      out[i + 1] = lower_.row(row).head(row + 1).dot(z.head(row + 1));
    }
  }

 private:
  HurstParam hurst_;
  std::size_t n_;
  Eigen::MatrixXd lower_;
};

// Standard Brownian motion from iid N(0, 1/n) increments.
inline void sample_bm_into(std::size_t n_steps, RandomStream& rng, std::span<double> out) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_steps));
  rng.fill_normal(out.subspan(1, n_steps));
  out[0] = 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    acc += scale * out[i];
    out[i] = acc;
  }
}

inline FbmPath sample_fbm(HurstParam hurst, std::size_t n_steps, std::uint64_t seed,
                          SamplingMethod method, std::uint64_t stream = 0) {
  if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
  std::vector<double> values(n_steps + 1);
  RandomStream rng(seed, stream);
  switch (method) {
    case SamplingMethod::Cholesky:
      CholeskySampler(hurst, n_steps).sample_into(rng, values);
      break;
    case SamplingMethod::CirculantEmbedding:
      CirculantSampler(hurst, n_steps).sample_into(rng, values);
      break;
    case SamplingMethod::IndependentIncrements:
      if (!hurst.is_brownian()) {
        throw ValidationError("independent-increment sampling is only exact for H = 1/2");
      }
      sample_bm_into(n_steps, rng, values);
      break;
  }
  return FbmPath(hurst, std::move(values), seed, stream, method);
}

inline FbmPath sample_bm(std::size_t n_steps, std::uint64_t seed, std::uint64_t stream = 0) {
  return sample_fbm(HurstParam(0.5), n_steps, seed, SamplingMethod::IndependentIncrements, stream);
}

// X_t = exp(B_t) pointwise; X_0 = 1.
inline std::vector<double> to_geometric(std::span<const double> values) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](double v) { return std::exp(v); });
  return out;
}

inline std::vector<double> to_geometric(const FbmPath& path) { return to_geometric(path.values()); }

}  // namespace fbmrate
