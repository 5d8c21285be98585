#pragma once

// Convex integrands f(x) = c + s x + sum_k w_k (x - a_k)^+ with a purely
// atomic second-derivative measure, plus a small registry of Lipschitz
// integrands with closed-form antiderivatives.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbmrate/errors.hpp"
#include "fbmrate/fbm.hpp"

namespace fbmrate {

struct Atom {
  double location;
  double mass;
  friend bool operator==(const Atom&, const Atom&) = default;
};

class ConvexSpec {
 public:
  ConvexSpec() = default;

  ConvexSpec(std::vector<Atom> atoms, double slope0, double intercept0, std::string label = {})
      : atoms_(std::move(atoms)), slope0_(slope0), intercept0_(intercept0), label_(std::move(label)) {
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      if (!std::isfinite(atoms_[k].location) || !(atoms_[k].mass > 0.0) || !std::isfinite(atoms_[k].mass)) {
        throw ValidationError("atom masses must be finite and strictly positive");
      }
      if (k > 0 && !(atoms_[k - 1].location < atoms_[k].location)) {
        throw ValidationError("atom locations must be strictly increasing");
      }
    }
    if (!std::isfinite(slope0_) || !std::isfinite(intercept0_)) {
      throw ValidationError("affine part must be finite");
    }
    cumulative_mass_.resize(atoms_.size() + 1, 0.0);
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      cumulative_mass_[k + 1] = cumulative_mass_[k] + atoms_[k].mass;
    }
  }

  // (x - a)^+ with unit mass.
  static ConvexSpec call(double strike) {
    return ConvexSpec({{strike, 1.0}}, 0.0, 0.0, "call@" + std::to_string(strike));
  }

  static ConvexSpec affine(double slope, double intercept) {
    return ConvexSpec({}, slope, intercept, "affine");
  }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  double slope0() const noexcept { return slope0_; }
  double intercept0() const noexcept { return intercept0_; }
  const std::string& label() const noexcept { return label_; }
  double total_mass() const noexcept { return cumulative_mass_.empty() ? 0.0 : cumulative_mass_.back(); }

  double value(double x) const noexcept {
    double out = intercept0_ + slope0_ * x;
    for (const auto& atom : atoms_) {
      if (x > atom.location) out += atom.mass * (x - atom.location);
    }
    return out;
  }

  // Left derivative: atoms sitting exactly at x do not contribute.
  double left_derivative(double x) const noexcept {
    const auto below = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                        [](const Atom& a, double v) { return a.location < v; });
    return slope0_ + cumulative_mass_[static_cast<std::size_t>(below - atoms_.begin())];
  }

  friend bool operator==(const ConvexSpec& a, const ConvexSpec& b) {
    return a.atoms_ == b.atoms_ && a.slope0_ == b.slope0_ && a.intercept0_ == b.intercept0_ &&
           a.label_ == b.label_;
  }

 private:
  std::vector<Atom> atoms_;
  double slope0_ = 0.0;
  double intercept0_ = 0.0;
  std::string label_;
  std::vector<double> cumulative_mass_{0.0};
};

inline double eval_f(const ConvexSpec& spec, double x) noexcept { return spec.value(x); }
inline double eval_left_derivative(const ConvexSpec& spec, double x) noexcept {
  return spec.left_derivative(x);
}

// Named Lipschitz integrands. Each entry carries f, an antiderivative F
// with F(0) = 0 and a Lipschitz constant, so the pathwise chain rule
// F(B_1) - F(B_0) gives the exact integral for H > 1/2.
enum class LipschitzKind { ClippedIdentity, Sine, Tanh };

class LipschitzSpec {
 public:
  explicit LipschitzSpec(LipschitzKind kind) : kind_(kind) {}

  static LipschitzSpec from_name(std::string_view name) {
    if (name == "clipped_identity") return LipschitzSpec(LipschitzKind::ClippedIdentity);
    if (name == "sine") return LipschitzSpec(LipschitzKind::Sine);
    if (name == "tanh") return LipschitzSpec(LipschitzKind::Tanh);
    throw ValidationError("unknown Lipschitz integrand '" + std::string(name) +
                          "' (known: clipped_identity, sine, tanh)");
  }

  static constexpr std::array<std::string_view, 3> registry_names() {
    return {"clipped_identity", "sine", "tanh"};
  }

  LipschitzKind kind() const noexcept { return kind_; }

  std::string_view name() const noexcept {
    switch (kind_) {
      case LipschitzKind::ClippedIdentity: return "clipped_identity";
      case LipschitzKind::Sine: return "sine";
      case LipschitzKind::Tanh: return "tanh";
    }
    return "unknown";
  }

  double lipschitz_constant() const noexcept { return 1.0; }

  double value(double x) const noexcept {
    switch (kind_) {
      case LipschitzKind::ClippedIdentity: return std::clamp(x, -1.0, 1.0);
      case LipschitzKind::Sine: return std::sin(x);
      case LipschitzKind::Tanh: return std::tanh(x);
    }
    return 0.0;
  }

  double antiderivative(double x) const noexcept {
    switch (kind_) {
      case LipschitzKind::ClippedIdentity: {
        const double ax = std::abs(x);
        return ax <= 1.0 ? 0.5 * x * x : ax - 0.5;
      }
      case LipschitzKind::Sine: return 1.0 - std::cos(x);
      case LipschitzKind::Tanh: {
        // log cosh x, written to avoid overflow.
        const double ax = std::abs(x);
        return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
      }
    }
    return 0.0;
  }

  friend bool operator==(const LipschitzSpec&, const LipschitzSpec&) = default;

 private:
  LipschitzKind kind_;
};

// max(1, |a|) exp(-min(a^2, (a-1)^2) / 2)
inline double constant_C(double a) noexcept {
  const double m = std::min(a * a, (a - 1.0) * (a - 1.0));
  return std::max(1.0, std::abs(a)) * std::exp(-0.5 * m);
}

enum class Hypothesis { H1, H2, H3 };

struct HypothesisCheck {
  bool holds;
  double integral_value;
};

// For a finite atomic measure every hypothesis integral is a finite sum, so
// `holds` is always true; the value is kept for constant bookkeeping.
inline HypothesisCheck check_hypothesis(const ConvexSpec& spec, Hypothesis which, double p) {
  if (which != Hypothesis::H3 && !(p > 0.0)) throw ValidationError("p must be positive");
  double total = 0.0;
  for (const auto& atom : spec.atoms()) {
    double g = 0.0;
    switch (which) {
      case Hypothesis::H1:
        g = std::pow(constant_C(atom.location), 1.0 / p);
        break;
      case Hypothesis::H2:
        if (!(atom.location > 0.0)) {
          throw DomainError("hypothesis H2 needs atoms at positive locations (log of " +
                            std::to_string(atom.location) + ")");
        }
        g = std::pow(constant_C(std::log(atom.location)), 1.0 / p);
        break;
      case Hypothesis::H3: {
        const double a = atom.location;
        g = std::exp(-0.5 * std::min(a * a, (a - 1.0) * (a - 1.0)));
        break;
      }
    }
    total += atom.mass * g;
  }
  return {std::isfinite(total), total};
}

inline constexpr double kExcludedBetaTolerance = 1e-12;

// Returns a description of the first violated inequality, or nullopt when
// 2H < p < H/(1-H), 1-H < beta < H/p and beta != 1 - 2H/p all hold.
inline std::optional<std::string> rate_param_violation(HurstParam hurst, double p, double beta) {
  const double h = hurst.value();
  if (!(h > 0.5)) return "H > 1/2 is required (got H = " + std::to_string(h) + ")";
  if (!(2.0 * h < p)) {
    return "range of p violated: need 2H < p < H/(1-H), got p = " + std::to_string(p) +
           " <= 2H = " + std::to_string(2.0 * h);
  }
  if (!(p < h / (1.0 - h))) {
    return "range of p violated: need 2H < p < H/(1-H), got p = " + std::to_string(p) +
           " >= H/(1-H) = " + std::to_string(h / (1.0 - h));
  }
  if (!(1.0 - h < beta)) {
    return "range of beta violated: need 1-H < beta < H/p, got beta = " + std::to_string(beta) +
           " <= 1-H = " + std::to_string(1.0 - h);
  }
  if (!(beta < h / p)) {
    return "range of beta violated: need 1-H < beta < H/p, got beta = " + std::to_string(beta) +
           " >= H/p = " + std::to_string(h / p);
  }
  if (std::abs(beta - (1.0 - 2.0 * h / p)) <= kExcludedBetaTolerance) {
    return "excluded beta: need beta != 1 - 2H/p = " + std::to_string(1.0 - 2.0 * h / p);
  }
  return std::nullopt;
}

inline bool validate_rate_params(HurstParam hurst, double p, double beta) {
  return !rate_param_violation(hurst, p, beta).has_value();
}

}  // namespace fbmrate
