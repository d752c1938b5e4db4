#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "adaptivefog/empirical_stats.hpp"
#include "adaptivefog/errors.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace adaptivefog;

TEST(Confidence, ThreeSampleExamples) {
  const EmpiricalCdf f({10, 20, 30});
  EXPECT_EQ(confidence(f, 30), 1.0);
  EXPECT_EQ(confidence(f, 5), 0.0);
  EXPECT_DOUBLE_EQ(confidence(f, 20), 2.0 / 3.0);  // closed at the sample
}

TEST(Confidence, Errors) {
  EXPECT_THROW(EmpiricalCdf(std::vector<double>{}), DomainError);
  EXPECT_THROW(confidence(EmpiricalCdf({1.0}), 0.0), DomainError);
  EXPECT_THROW(confidence(EmpiricalCdf(), 10.0), DomainError);
}

TEST(Confidence, MonotoneAndBounded) {
  gen::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto xs = gen::latencies(rng, 40, 1.0, 300.0, i % 2 == 0);
    const EmpiricalCdf f(xs);
    double prev = 0.0;
    for (double r = 1.0; r <= 320.0; r += 2.5) {
      const double c = confidence(f, r);
      EXPECT_GE(c, prev);
      prev = c;
    }
    EXPECT_EQ(confidence(f, f.max()), 1.0);
    if (f.min() > 1.0) EXPECT_EQ(confidence(f, std::nextafter(f.min(), 0.0)), 0.0);
  }
}

TEST(WeightedConfidence, HalfAndHalf) {
  const ServiceSet s({{0, 100, 0.5}, {1, 10, 0.5}});
  const EmpiricalCdf f({50, 60});
  EXPECT_DOUBLE_EQ(weighted_confidence(f, s), 0.5);
  const std::vector<EmpiricalCdf> per{EmpiricalCdf({5}), EmpiricalCdf({50})};
  EXPECT_DOUBLE_EQ(weighted_confidence(per, s), 0.5);
  const std::vector<EmpiricalCdf> wrong{EmpiricalCdf({5})};
  EXPECT_THROW(weighted_confidence(wrong, s), DomainError);
}

TEST(WeightedConfidence, MatchesCountingOracle) {
  const std::vector<double> xs = {12, 45, 45, 61, 70, 78, 83, 90, 91, 99, 100, 104, 118, 120, 131, 150, 151, 170, 200, 240};
  const ServiceSet s({{0, 45, 0.2}, {1, 100, 0.5}, {2, 150, 0.3}});
  // 3 of 20 at 45, 11 at 100, 16 at 150.
  EXPECT_NEAR(weighted_confidence(EmpiricalCdf(xs), s), 0.2 * 3 / 20 + 0.5 * 11 / 20 + 0.3 * 16 / 20, 1e-15);
  EXPECT_NEAR(weighted_confidence(EmpiricalCdf(xs), s), oracle::weighted(xs, s), 1e-15);
}

TEST(KrDistance, HandExample) {
  const EmpiricalCdf f({50, 60, 90});
  const EmpiricalCdf g({70, 80, 100});
  const ServiceSet s({{0, 65, 1.0}});
  EXPECT_DOUBLE_EQ(kr_distance(f, g, s), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(kr_distance(g, f, s), -2.0 / 3.0);
  EXPECT_EQ(kr_distance(f, f, s), 0.0);
}

TEST(KrDistance, RandomPairProperties) {
  gen::Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const auto a = gen::latencies(rng, 30);
    const auto b = gen::latencies(rng, 30);
    const auto s = gen::services(rng);
    const EmpiricalCdf f(a), g(b);
    const double k = kr_distance(f, g, s);
    EXPECT_EQ(k, -kr_distance(g, f, s));
    EXPECT_LE(std::abs(k), s.total_weight() + 1e-15);
    EXPECT_NEAR(weighted_confidence(f, s) - weighted_confidence(g, s), k, 1e-12);
    EXPECT_NEAR(k, oracle::weighted(a, s) - oracle::weighted(b, s), 1e-12);
  }
}

TEST(SwitchingPenalty, ScalarIsTheValue) {
  const EmpiricalCdf f({50, 90});
  EXPECT_EQ(switching_penalty(f, ServiceSet::defaults(), SwitchCost::scalar(0.125)), 0.125);
  EXPECT_THROW(switching_penalty(f, ServiceSet::defaults(), SwitchCost::scalar(-1.0)), DomainError);
  EXPECT_THROW(switching_penalty(f, ServiceSet::defaults(), SwitchCost::cdf_shift(-1.0)), DomainError);
}

TEST(SwitchingPenalty, CdfShiftHandExample) {
  const EmpiricalCdf f({50, 90});
  const ServiceSet s({{0, 100, 1.0}});
  EXPECT_EQ(switching_penalty(f, s, SwitchCost::cdf_shift(20.0)), 0.5);
  EXPECT_EQ(switching_penalty(f, s, SwitchCost::cdf_shift(0.0)), 0.0);
}

TEST(SwitchingPenalty, CdfShiftMonotoneInCost) {
  gen::Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto xs = gen::latencies(rng, 40, 20.0, 220.0, true);
    const auto s = gen::services(rng);
    const EmpiricalCdf f(xs);
    double prev = -1.0;
    for (int c = 0; c <= 200; c += 10) {
      const double p = switching_penalty(f, s, SwitchCost::cdf_shift(c));
      if (c == 0) {
        EXPECT_EQ(p, 0.0);
      }
      EXPECT_GE(p, prev);
      EXPECT_NEAR(p, oracle::penalty(xs, s, SwitchCost::cdf_shift(c)), 1e-12);
      prev = p;
    }
  }
}

TEST(Quantile, SmallestSampleReachingP) {
  const EmpiricalCdf f({10, 20, 30, 40});
  EXPECT_EQ(f.quantile(0.25), 10);
  EXPECT_EQ(f.quantile(0.26), 20);
  EXPECT_EQ(f.quantile(1.0), 40);
  EXPECT_EQ(f.quantile(0.0), 10);
}

TEST(Summarize, MatchesHandStats) {
  const std::vector<double> xs = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto st = summarize(xs);
  EXPECT_EQ(st.count, 10u);
  EXPECT_DOUBLE_EQ(st.mean, 5.5);
  EXPECT_NEAR(st.stddev, 3.0276503540974917, 1e-12);
  EXPECT_DOUBLE_EQ(st.median, 5.5);
  EXPECT_NEAR(st.p90, 9.1, 1e-12);
  EXPECT_THROW(summarize(std::vector<double>{}), DomainError);
}
