#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fbmrate/discretize.hpp"
#include "support.hpp"

using namespace fbmrate;

TEST(RiemannSum, ConstantIntegrandTelescopes) {
  const auto p = sample_fbm(HurstParam(0.7), 64, 1, SamplingMethod::CirculantEmbedding);
  const auto c = ConvexSpec::affine(2.5, 0.0);
  for (std::size_t n : {1u, 2u, 8u, 64u}) EXPECT_NEAR(riemann_sum(p.values(), c, n), 2.5 * p.terminal(), 1e-12);
}

TEST(RiemannSum, ZeroPath) {
  const std::vector<double> zero(17, 0.0);
  EXPECT_EQ(riemann_sum(zero, ConvexSpec::call(0.3), 4), 0.0);
}

TEST(RiemannSum, IdentityPathHandComputation) {
  const std::vector<double> id{0.0, 0.25, 0.5, 0.75, 1.0};
  EXPECT_DOUBLE_EQ(riemann_sum(id, 4, [](double x) { return x; }), 0.375);
}

TEST(RiemannSum, GridMismatch) {
  const std::vector<double> path(13, 0.0);
  EXPECT_THROW(riemann_sum(path, ConvexSpec::call(0.0), 5), GridMismatchError);
  EXPECT_NO_THROW(riemann_sum(path, ConvexSpec::call(0.0), 4));
}

TEST(RiemannSum, LinearInIntegrand) {
  const auto p = sample_fbm(HurstParam(0.8), 256, 3, SamplingMethod::CirculantEmbedding);
  const ConvexSpec mix({{-0.3, 0.5}, {0.1, 2.0}, {0.6, 1.25}}, 0.7, 0.0);
  for (std::size_t n : {4u, 32u, 256u}) {
    double parts = 0.7 * p.terminal();
    for (const auto& a : mix.atoms()) parts += a.mass * riemann_sum(p.values(), ConvexSpec::call(a.location), n);
    EXPECT_NEAR(riemann_sum(p.values(), mix, n), parts, 1e-12);
  }
}

TEST(ItoOracle, Examples) {
  const std::vector<double> path{0.0, 0.2, 0.7};
  EXPECT_NEAR(ito_oracle(path, ConvexSpec::call(0.0), HurstParam(0.75)), 0.7, 1e-15);
  const std::vector<double> down{0.0, -0.3};
  EXPECT_NEAR(ito_oracle(down, ConvexSpec::affine(2.0, 0.0), HurstParam(0.75)), -0.6, 1e-15);
  const double b1 = 0.4, a = 1.2;
  const auto x = to_geometric(std::vector<double>{0.0, 0.1, b1});
  EXPECT_NEAR(ito_oracle(x, ConvexSpec::call(a), HurstParam(0.75)),
              std::max(std::exp(b1) - a, 0.0) - std::max(1.0 - a, 0.0), 1e-15);
  EXPECT_THROW(ito_oracle(path, ConvexSpec::call(0.0), HurstParam(0.5)), ContractViolation);
}

TEST(ItoOracle, SumConvergesToChainRuleInL1) {
  const HurstParam h(0.75);
  const auto spec = ConvexSpec::call(0.2);
  const std::size_t fine = 1024, reps = 400;
  const CirculantSampler sampler(h, fine);
  std::vector<double> path(fine + 1);
  double e16 = 0.0, e1024 = 0.0;
  for (std::size_t k = 0; k < reps; ++k) {
    RandomStream rng(31, k);
    sampler.sample_into(rng, path);
    const double oracle = ito_oracle(path, spec, h);
    e16 += std::abs(riemann_sum(path, spec, 16) - oracle);
    e1024 += std::abs(riemann_sum(path, spec, 1024) - oracle);
  }
  EXPECT_LT(e1024, 0.3 * e16);
}

TEST(BmReference, RefusesCoarseGrids) {
  const auto w = sample_bm(1024, 2);
  EXPECT_THROW(bm_reference(w.values(), ConvexSpec::call(0.0), 1024, 32), ValidationError);
  EXPECT_NO_THROW(bm_reference(w.values(), ConvexSpec::call(0.0), 1024, 16));
  EXPECT_THROW(bm_reference(w.values(), ConvexSpec::call(0.0), 512, 4), GridMismatchError);
}

TEST(BmReference, ConstantIntegrandIsExact) {
  for (std::size_t n_ref : {1024u, 4096u}) {
    const auto w = sample_bm(n_ref, 5);
    EXPECT_NEAR(bm_reference(w.values(), ConvexSpec::affine(1.5, 0.0), n_ref, 16), 1.5 * w.terminal(), 1e-12);
  }
}

TEST(BmReference, DoubledResolutionSelfConsistency) {
  // Same Brownian path at N and 2N (the coarse grid is every other point).
  const std::size_t n_ref = 1024, reps = 2000;
  const auto spec = ConvexSpec::call(0.0);
  std::vector<double> path(2 * n_ref + 1), coarse(n_ref + 1);
  double sq = 0.0;
  for (std::size_t k = 0; k < reps; ++k) {
    RandomStream rng(17, k);
    sample_bm_into(2 * n_ref, rng, path);
    for (std::size_t i = 0; i <= n_ref; ++i) coarse[i] = path[2 * i];
    const double d = bm_reference(path, spec, 2 * n_ref, 16) - bm_reference(coarse, spec, n_ref, 16);
    sq += d * d;
  }
  const double l2 = std::sqrt(sq / reps);
  const double exact = isometry_error_norm(n_ref, 0.0, 16);
  EXPECT_GT(l2, 0.3 * exact);
  EXPECT_LT(l2, 1.2 * exact);
}

TEST(IsometryErrorNorm, SingleStepClosedForm) {
  // n = 1, a = 0: int_0^1 P(W_t > 0) dt = 1/2.
  EXPECT_NEAR(isometry_error_norm(1, 0.0, 16), std::sqrt(0.5), 1e-12);
  EXPECT_LT(isometry_error_norm(1, 12.0, 16), 1e-12);
  EXPECT_LT(isometry_error_norm(4, -12.0, 16), 1e-12);
  EXPECT_THROW(isometry_error_norm(4, 0.0, 3), ValidationError);
}

TEST(IsometryErrorNorm, StableInQuadraturePoints) {
  for (std::size_t n : {16u, 64u}) EXPECT_NEAR(isometry_error_norm(n, 0.3, 16), isometry_error_norm(n, 0.3, 32), 1e-9);
}

TEST(IsometryErrorNorm, QuarterRate) {
  std::vector<double> ns{16, 32, 64, 128}, vals;
  for (double n : ns) vals.push_back(isometry_error_norm(static_cast<std::size_t>(n), 0.0, 16));
  const double slope = test_support::loglog_slope(ns, vals);
  EXPECT_GE(slope, -0.30);
  EXPECT_LE(slope, -0.20);
}

TEST(IsometryErrorNorm, AgreesWithMonteCarloAtSixteen) {
  const std::size_t n = 16, n_ref = 1024, reps = 20000;
  const auto spec = ConvexSpec::call(0.0);
  std::vector<double> path(n_ref + 1), sq(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    RandomStream rng(23, k);
    sample_bm_into(n_ref, rng, path);
    const double e = riemann_sum(path, spec, n) - bm_reference(path, spec, n_ref, n);
    sq[k] = e * e;
  }
  double mean = 0.0, var = 0.0;
  for (double v : sq) mean += v;
  mean /= reps;
  for (double v : sq) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / (reps - 1) / reps) / (2.0 * std::sqrt(mean));
  // The reference at 1024 steps still carries its own error, which biases
  // the MC norm low by a relative ~ (16/1024)^{1/2}/2; allow for it.
  const double exact = isometry_error_norm(n, 0.0, 16);
  EXPECT_LT(std::abs(std::sqrt(mean) - exact), 3.0 * se + 0.01 * exact);
}

TEST(Refinement, MedianErrorDecreasesAndPathsConverge) {
  const HurstParam h(0.75);
  const auto spec = ConvexSpec::call(0.2);
  const std::size_t fine = 4096, reps = 1000;
  const std::vector<std::size_t> ns{16, 32, 64, 128, 256, 512, 1024, 2048};
  const CirculantSampler sampler(h, fine);
  std::vector<std::vector<double>> abs_err(ns.size(), std::vector<double>(reps));
  std::vector<double> path(fine + 1);
  std::size_t improved = 0;
  for (std::size_t k = 0; k < reps; ++k) {
    RandomStream rng(41, k);
    sampler.sample_into(rng, path);
    const double oracle = ito_oracle(path, spec, h);
    for (std::size_t j = 0; j < ns.size(); ++j) abs_err[j][k] = std::abs(riemann_sum(path, spec, ns[j]) - oracle);
    // Paths that never reach the kink have zero error at every n; a tie
    // counts as no worse.
    if (std::abs(riemann_sum(path, spec, fine) - oracle) <= abs_err[0][k]) ++improved;
  }
  for (std::size_t j = 1; j < ns.size(); ++j) {
    EXPECT_LE(test_support::quantile(abs_err[j], 0.5), test_support::quantile(abs_err[j - 1], 0.5)) << ns[j];
  }
  EXPECT_GT(static_cast<double>(improved) / reps, 0.95);
}
