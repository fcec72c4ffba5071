#include <gtest/gtest.h>

#include <cmath>

#include "koco/error.hpp"
#include "koco/kors.hpp"
#include "koco/oracle.hpp"
#include "test_support.hpp"

using namespace koco;

namespace {
KorsConfig cfg(double eps, double beta, std::uint64_t seed = 0, double alpha = 1.0) {
  return KorsConfig{alpha, eps, beta, 0.1, seed};
}
}  // namespace

TEST(Kors, EstimateOnEmptyDictionary) {
  Dictionary d(1.0);
  EXPECT_DOUBLE_EQ(kors_estimate_rls(d, DenseVec(), 1.0, cfg(0.0, 1.0)), 0.5);
  EXPECT_DOUBLE_EQ(kors_estimate_rls(d, DenseVec(), 1.0, cfg(0.5, 1.0)), 0.75);
}

TEST(Kors, FullUnitDictionaryGivesExactLeverage) {
  std::vector<Point> pts;
  const auto raw = support::random_matrix(2, 30, 5);
  for (Index j = 0; j < raw.cols(); ++j) pts.push_back(raw.col(j));
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const DenseVec tau = online_rls(gram(k, pts), 1.0);
  Dictionary d(1.0);
  for (std::size_t t = 0; t < pts.size(); ++t) {
    const DenseVec col = d.rescaled_column(k, pts[t], 1.0);
    EXPECT_NEAR(kors_estimate_rls(d, col, 1.0, cfg(0.0, 1.0)), tau(static_cast<Index>(t)), 1e-9);
    d.add(t + 1, 1.0, pts[t], 1.0, col, 1.0);
  }
}

TEST(Kors, EstimateMatchesTemporaryAppend) {
  // explicit version of the temporary member: grow a copy and read the
  // leverage from its last diagonal entry
  std::vector<Point> pts;
  const auto raw = support::random_matrix(1, 12, 6);
  for (Index j = 0; j < raw.cols(); ++j) pts.push_back(raw.col(j));
  const KernelSpec k = KernelSpec::gaussian(1.0);
  Dictionary d(0.5);
  for (std::size_t t = 0; t < 8; ++t) {
    const DenseVec col = d.rescaled_column(k, pts[t], 1.0);
    d.add(t + 1, 0.4 + 0.05 * t, pts[t], 1.0, col, 1.0);
  }
  const DenseVec col = d.rescaled_column(k, pts[9], 1.0);
  RegularizedInverse tmp = d.sub_inv();
  tmp.append(d.weighted_column(col), 1.0);
  // tau = (1/alpha)(k_tt - c^T (P + alpha I)^{-1} c) over the augmented set = 1 - alpha * inv_tt
  const double via_append = 1.0 - 0.5 * tmp.inverse()(8, 8);
  EXPECT_NEAR(kors_estimate_rls(d, col, 1.0, cfg(0.0, 1.0, 0, 0.5)), via_append, 1e-12);
}

TEST(Kors, SampleBranches) {
  CounterRng rng(1);
  const KorsDraw always = kors_sample(0.5, cfg(0.5, 4.0), rng);
  EXPECT_EQ(always.p_tilde, 1.0);
  EXPECT_TRUE(always.z);
  const KorsDraw never = kors_sample(0.0, cfg(0.5, 4.0), rng);
  EXPECT_EQ(never.p_tilde, 0.0);
  EXPECT_FALSE(never.z);
  EXPECT_EQ(rng.counter(), 2u);
  EXPECT_THROW(kors_sample(-1.0, cfg(0.5, 1.0), rng), InvalidArgument);
}

TEST(Kors, AcceptanceFrequency) {
  CounterRng rng(sub_seed(11, "coin"));
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += kors_sample(0.3, cfg(0.5, 1.0), rng).z;
  EXPECT_NEAR(hits / 10000.0, 0.3, 0.015);
}

TEST(Kors, Bounds) {
  EXPECT_DOUBLE_EQ(dict_size_bound(10.0, 1.0, 1.0, 2.0), 60.0);
  EXPECT_DOUBLE_EQ(dict_size_bound(2.0, 5.0, 1.0, 2.0), 60.0);
  EXPECT_EQ(dict_size_bound(3.0, 5.0, 0.5, 0.0), 0.0);
  EXPECT_NEAR(beta_threshold(1000, 0.01, 0.5), 3.0 * std::log(1e5) / 0.25, 1e-9);
  EXPECT_NEAR(beta_threshold(1000, 0.01, 0.5), 138.155, 1e-3);
  EXPECT_DOUBLE_EQ(cfg(0.5, 1.0).rho(), 3.0);
}

TEST(Kors, DuplicatePointsKeepSmallDictionary) {
  // leverage of the s-th copy is 1/(s + alpha); beta tau drops below 1 quickly
  KorsSampler s(KernelSpec::gaussian(1.0), cfg(0.5, 20.0, 3));
  for (int t = 0; t < 2000; ++t) s.step(Point::Zero(1));
  EXPECT_LT(s.dictionary().size(), 300u);
  EXPECT_GT(s.dictionary().size(), 20u);
}

TEST(Kors, FarApartPointsAllEnter) {
  KorsSampler s(KernelSpec::gaussian(1.0), cfg(0.5, 3.0, 4));
  for (int t = 0; t < 50; ++t) {
    const KorsStep st = s.step(Point::Constant(1, 100.0 * t));
    EXPECT_NEAR(st.tau_tilde, 1.5 / 2.0, 1e-12);
    EXPECT_TRUE(st.z);
  }
  EXPECT_EQ(s.dictionary().size(), 50u);
}

TEST(Kors, DeterministicPerSeed) {
  auto run = [](std::uint64_t seed) {
    KorsSampler s(KernelSpec::gaussian(1.0), cfg(0.5, 5.0, seed, 20.0));
    const auto raw = support::random_matrix(1, 300, 8);
    for (Index j = 0; j < raw.cols(); ++j) s.step(raw.col(j));
    std::vector<std::size_t> idx;
    for (const DictEntry& e : s.dictionary().entries()) idx.push_back(e.index);
    return idx;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(Kors, WeightsAreInverseProbabilities) {
  KorsSampler s(KernelSpec::gaussian(1.0), cfg(0.5, 2.0, 9, 30.0));
  const auto raw = support::random_matrix(1, 200, 9);
  for (Index j = 0; j < raw.cols(); ++j) s.step(raw.col(j));
  for (const DictEntry& e : s.dictionary().entries()) {
    EXPECT_GT(e.prob, 0.0);
    EXPECT_LE(e.prob, 1.0);
    EXPECT_DOUBLE_EQ(e.weight, 1.0 / e.prob);
  }
  EXPECT_EQ(s.dictionary().sub_inv().order(), static_cast<Index>(s.dictionary().size()));
  const DenseVec w = s.round_weights(100);
  EXPECT_EQ(w.size(), 100);
  EXPECT_THROW(s.round_weights(201), InvalidArgument);
}

TEST(Kors, ConfigValidation) {
  EXPECT_THROW(KorsSampler(KernelSpec::gaussian(1.0), cfg(1.5, 1.0)), InvalidArgument);
  EXPECT_THROW(KorsSampler(KernelSpec::gaussian(1.0), KorsConfig{1.0, 0.5, 1.0, 1.0, 0}), InvalidArgument);
  EXPECT_THROW(KorsSampler(KernelSpec::gaussian(1.0), KorsConfig{0.0, 0.5, 1.0, 0.1, 0}), InvalidArgument);
}
