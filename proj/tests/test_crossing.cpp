#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbmrate/crossing.hpp"
#include "support.hpp"

using namespace fbmrate;

TEST(GaussLegendre, ExactOnPolynomials) {
  for (int pts : {1, 2, 5, 16, 32, 64}) {
    const auto& rule = gauss_legendre(pts);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-14);
    // Degree 2 pts - 1 is integrated exactly.
    const int k = 2 * pts - 1;
    const double integral = gauss_legendre_integral(rule, [&](double x) { return std::pow(x, k); }, 0.0, 1.0);
    EXPECT_NEAR(integral, 1.0 / (k + 1), 1e-13) << pts;
  }
}

TEST(AdaptiveQuadrature, FailureCarriesEstimate) {
  auto nasty = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); };
  try {
    adaptive_gauss_legendre(nasty, 0.0, 1.0, 32, 1e-14, 20);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_TRUE(std::isfinite(e.estimate()));
    EXPECT_NEAR(e.estimate(), 2.0 * (std::sqrt(0.3) + std::sqrt(0.7)), 0.1);
  }
}

TEST(ConditionalDecomposition, BrownianCase) {
  const auto d = conditional_decomposition(CrossingQuery(0.3, 0.8, 0.0, HurstParam(0.5)));
  EXPECT_EQ(d.slope, 1.0);
  EXPECT_NEAR(d.sigma, std::sqrt(0.5), 1e-15);
}

TEST(ConditionalDecomposition, DegenerateAtEqualTimes) {
  const auto d = conditional_decomposition(CrossingQuery(0.4, 0.4, 0.0, HurstParam(0.7)));
  EXPECT_EQ(d.slope, 1.0);
  EXPECT_EQ(d.sigma, 0.0);
}

TEST(ConditionalDecomposition, ReproducesJointLaw) {
  const HurstParam h(0.75);
  const auto d = conditional_decomposition(CrossingQuery(0.25, 0.5, 0.0, h));
  EXPECT_NEAR(d.slope * fbm_covariance(0.25, 0.25, h), fbm_covariance(0.5, 0.25, h), 1e-14);
  const double var_t = d.slope * d.slope * fbm_covariance(0.25, 0.25, h) + d.sigma * d.sigma;
  EXPECT_NEAR(var_t, fbm_covariance(0.5, 0.5, h), 1e-14);
}

TEST(CrossingProbability, OrthantValue) {
  const double p = crossing_probability(CrossingQuery(0.5, 1.0, 0.0, HurstParam(0.5)), 32);
  EXPECT_NEAR(p, 0.25 - std::asin(std::sqrt(0.5)) / (2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(p, 0.125, 1e-8);
}

TEST(CrossingProbability, VanishesForFarLevels) {
  for (double h : {0.5, 0.75}) {
    EXPECT_LT(crossing_probability(CrossingQuery(0.3, 0.6, 12.0, HurstParam(h))), 1e-20);
    EXPECT_LT(crossing_probability(CrossingQuery(0.3, 0.6, -12.0, HurstParam(h))), 1e-20);
  }
}

TEST(CrossingProbability, RejectsFewPoints) {
  EXPECT_THROW(crossing_probability(CrossingQuery(0.3, 0.6, 0.0, HurstParam(0.7)), 16), ValidationError);
  EXPECT_THROW(CrossingQuery(0.6, 0.3, 0.0, HurstParam(0.7)), ValidationError);
  EXPECT_THROW(CrossingQuery(0.0, 0.3, 0.0, HurstParam(0.7)), ValidationError);
}

TEST(CrossingProbability, MatchesMonteCarlo) {
  const HurstParam h(0.75);
  const double p = crossing_probability(CrossingQuery(0.5, 0.75, 0.5, h), 32);
  const auto mc = test_support::crossing_mc(0.5, 0.75, 0.5, h, 2000000, 77);
  EXPECT_LT(std::abs(p - mc.mean), 4.0 * mc.stderr_) << p << " vs " << mc.mean;
}

TEST(CrossingProbability, StableUnderDoublingPoints) {
  for (double h : {0.5, 0.6, 0.9}) {
    for (double a : {-1.0, 0.0, 0.4, 2.0}) {
      const CrossingQuery q(0.2, 0.9, a, HurstParam(h));
      EXPECT_NEAR(crossing_probability(q, 32), crossing_probability(q, 64), 1e-10);
    }
  }
}

TEST(CrossingProbability, DisjointEventsAndMonotoneInT) {
  for (double h : {0.5, 0.6, 0.75, 0.9}) {
    for (double a : {-1.5, -0.3, 0.0, 0.5, 1.0, 2.5}) {
      double prev = 0.0;
      for (double t = 0.3; t <= 1.0 + 1e-12; t += 0.05) {
        const CrossingQuery q(0.3, std::min(t, 1.0), a, HurstParam(h));
        const double p = crossing_probability(q);
        EXPECT_LE(p + crossing_probability_reflected(q), 1.0);
        EXPECT_GE(p, prev - 1e-9);
        prev = p;
      }
    }
  }
}

TEST(CrossingProbability, BrownianSpecialisation) {
  const HurstParam h(0.5);
  for (double s : {0.1, 0.5, 0.9}) {
    EXPECT_DOUBLE_EQ(fbm_covariance(s, s, h), fbm_covariance(1.0, s, h));
    EXPECT_EQ(conditional_decomposition(CrossingQuery(s, 1.0, 0.3, h)).slope, 1.0);
  }
}

TEST(BoundSweep, FiniteNonnegativeAndLocated) {
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  const std::vector<double> levels{-2, -1, 0, 1, 2};
  const auto sweep = bound_ratio_sweep(HurstParam(0.5), grid, grid, levels, 32);
  EXPECT_TRUE(std::isfinite(sweep.max_ratio));
  EXPECT_EQ(sweep.entries.size(), 10u * 5u);
  double best = 0.0;
  for (const auto& e : sweep.entries) {
    EXPECT_GE(e.result.ratio, 0.0);
    EXPECT_GT(e.result.bound_value, 0.0);
    best = std::max(best, e.result.ratio);
  }
  EXPECT_EQ(best, sweep.max_ratio);
  EXPECT_EQ(crossing_result(sweep.argmax).ratio, sweep.max_ratio);
}

TEST(BoundSweep, RoundingLevelGapIsSkipped) {
  const std::vector<double> s{0.15000000000000002}, t{0.15 + 1e-17, 0.15, 0.5}, a{0.0};
  const auto r = bound_ratio_sweep(HurstParam(0.75), s, t, a);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].t, 0.5);
}

TEST(BoundSweep, ThreadCountDoesNotChangeResult) {
  const std::vector<double> s{0.1, 0.4, 0.7}, t{0.5, 0.8, 1.0}, a{-1, 0, 1};
  const auto one = bound_ratio_sweep(HurstParam(0.75), s, t, a, 32, 1);
  const auto four = bound_ratio_sweep(HurstParam(0.75), s, t, a, 32, 4);
  ASSERT_EQ(one.entries.size(), four.entries.size());
  for (std::size_t i = 0; i < one.entries.size(); ++i) EXPECT_EQ(one.entries[i].result.ratio, four.entries[i].result.ratio);
  EXPECT_EQ(one.max_ratio, four.max_ratio);
}

TEST(CovarianceGapRatio, BoundedOnGrid) {
  const HurstParam h(0.75);
  EXPECT_EQ(lemma_a1_ratio(0.4, 0.4, h), 0.0);
  for (int i = 1; i <= 50; ++i) {
    for (int j = i; j <= 50; ++j) {
      const double s = i / 50.0, t = j / 50.0;
      const double r = lemma_a1_ratio(s, t, h);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, std::pow(2.0, 0.75) + 2.0);
      if (t > 2.0 * s) {
        EXPECT_LE(r, 1.0);
      }
    }
  }
  EXPECT_THROW(lemma_a1_ratio(0.2, 0.5, HurstParam(0.5)), ValidationError);
}

TEST(NormalTail, Examples) {
  const auto one = normal_tail_bound_check(1.0);
  EXPECT_NEAR(one.tail, 0.158655, 1e-6);
  EXPECT_NEAR(one.bound, 0.241971, 1e-6);
  EXPECT_LE(one.tail, one.bound);
  const auto eight = normal_tail_bound_check(8.0);
  EXPECT_NEAR(eight.bound / eight.tail, 1.0, 0.02);
  const auto small = normal_tail_bound_check(0.01);
  EXPECT_NEAR(small.tail, 0.496, 1e-3);
  EXPECT_NEAR(small.bound, 39.9, 0.05);
  EXPECT_THROW(normal_tail_bound_check(0.0), DomainError);
}
