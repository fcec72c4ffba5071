#include <gtest/gtest.h>

#include <cmath>

#include "koco/error.hpp"
#include "koco/harness/stream.hpp"
#include "koco/oracle.hpp"
#include "test_support.hpp"

using namespace koco;

namespace {
SymMat ones(Index n) { return SymMat(DenseMat::Ones(n, n)); }
}  // namespace

TEST(Oracle, ExactRlsExamples) {
  EXPECT_NEAR(exact_rls(SymMat::identity(1), 1.0)(0), 0.5, 1e-15);
  const DenseVec a = exact_rls(ones(7), 1.0);
  for (Index i = 0; i < 7; ++i) EXPECT_NEAR(a(i), 1.0 / 8.0, 1e-14);
  const DenseVec b = exact_rls(SymMat::identity(5), 1.0);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(b(i), 0.5, 1e-15);
}

TEST(Oracle, RlsSumsToEffectiveDimension) {
  const SymMat k(support::random_psd(20, 6, 2));
  for (const double a : {0.1, 1.0, 10.0}) {
    EXPECT_NEAR(exact_rls(k, a).sum(), effective_dimension(k, a), 1e-9);
    // trace against an independent inverse
    DenseMat shifted = k.matrix();
    shifted.diagonal().array() += a;
    EXPECT_NEAR((k.matrix() * support::gauss_jordan_inverse(shifted)).trace(), effective_dimension(k, a), 1e-9);
  }
}

TEST(Oracle, EffectiveDimension) {
  EXPECT_NEAR(effective_dimension(SymMat::identity(6), 1.0), 3.0, 1e-14);
  EXPECT_NEAR(effective_dimension(ones(9), 1.0), 0.9, 1e-12);
  EXPECT_EQ(effective_dimension(SymMat::zero(4), 1.0), 0.0);
  const SymMat k(support::random_psd(15, 15, 3));
  double prev = 1e300;
  for (double a = 0.01; a < 100.0; a *= 2.0) {
    const double d = effective_dimension(k, a);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(Oracle, OnlineEffectiveDimension) {
  EXPECT_NEAR(online_effective_dimension(SymMat::identity(1), 1.0), 0.5, 1e-15);
  double h = 0.0;
  for (int s = 1; s <= 10; ++s) h += 1.0 / (s + 1.0);
  EXPECT_NEAR(online_effective_dimension(ones(10), 1.0), h, 1e-12);
  EXPECT_NEAR(online_effective_dimension(SymMat::identity(8), 1.0), 4.0, 1e-14);
  // each prefix leverage against a direct prefix inverse
  const DenseMat k = support::random_psd(12, 5, 4);
  const DenseVec tau = online_rls(SymMat(k), 0.5);
  for (Index t = 1; t <= 12; ++t) {
    DenseMat p = k.topLeftCorner(t, t);
    p.diagonal().array() += 0.5;
    const double ref = 1.0 - 0.5 * support::gauss_jordan_inverse(p)(t - 1, t - 1);
    EXPECT_NEAR(tau(t - 1), ref, 1e-10);
  }
}

TEST(Oracle, LogdetChain) {
  const LogdetChain z = logdet_chain(SymMat::zero(3), 1.0);
  EXPECT_EQ(z.d_onl, 0.0);
  EXPECT_EQ(z.logdet, 0.0);
  EXPECT_EQ(z.upper, 0.0);
  const LogdetChain i = logdet_chain(SymMat::identity(6), 1.0);
  EXPECT_NEAR(i.d_onl, 3.0, 1e-14);
  EXPECT_NEAR(i.logdet, 6.0 * std::log(2.0), 1e-13);
  EXPECT_NEAR(i.upper, 3.0 * (1.0 + std::log(2.0)), 1e-13);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SymMat k(support::random_psd(25, 1 + seed % 10, 50 + seed));
    const LogdetChain c = logdet_chain(k, 0.3);
    EXPECT_GE(c.logdet - c.d_onl, -1e-9);
    EXPECT_GE(c.upper - c.logdet, -1e-9);
    const DenseVec ev = support::jacobi_eigenvalues(k.matrix());
    double ld = 0.0;
    for (Index j = 0; j < ev.size(); ++j) ld += std::log1p(std::max(ev(j), 0.0) / 0.3);
    EXPECT_NEAR(c.logdet, ld, 1e-8);
  }
}

TEST(Oracle, PrimalOnsExamples) {
  KonsConfig c;
  c.sigma = 0.125;
  c.lipschitz = 4.0;
  const std::vector<DenseVec> f1{DenseVec::Ones(1)};
  const std::vector<LossEvent> e1{{DenseVec::Ones(1), LossFamily::squared, 0.0}};
  EXPECT_EQ(primal_ons(f1, e1, c).yhat[0], 0.0);

  // two steps in R^2 by hand, projection inactive
  DenseVec a(2), b(2);
  a << 1, 0;
  b << std::sqrt(0.5), std::sqrt(0.5);
  const std::vector<DenseVec> f2{a, b};
  const std::vector<LossEvent> e2{{a, LossFamily::squared, 0.5}, {b, LossFamily::squared, 0.0}};
  const PrimalOnsTrace tr = primal_ons(f2, e2, c);
  // round 1: yhat 0, g = -1 along a, A_1 = diag(1 + 0.125, 1)
  // round 2: u = -A_1^{-1} g = (1/1.125, 0), ybar = b^T u
  EXPECT_DOUBLE_EQ(tr.gdot[0], -1.0);
  EXPECT_NEAR(tr.ybar[1], std::sqrt(0.5) / 1.125, 1e-15);
  EXPECT_NEAR(tr.yhat[1], std::sqrt(0.5) / 1.125, 1e-15);
  EXPECT_THROW(primal_ons({2.0 * a}, {e2[0]}, c), InvalidArgument);
}

TEST(Oracle, PrimalOnsClipsAndShrinksWithHugeAlpha) {
  harness::SyntheticSpec s;
  s.input_dim = 3;
  s.horizon = 100;
  const auto ev = harness::generate_stream(s, 3);
  std::vector<DenseVec> f;
  for (const auto& e : ev) f.push_back(e.point.normalized());
  KonsConfig c;
  c.sigma = 5.0;
  c.alpha = 0.01;
  for (const double y : primal_ons(f, ev, c).yhat) EXPECT_LE(std::abs(y), 1.0);
  c.alpha = 1e9;
  c.sigma = 0.125;
  for (const double y : primal_ons(f, ev, c).yhat) EXPECT_LT(std::abs(y), 1e-6);
}

TEST(Oracle, ComparatorExamples) {
  const std::vector<LossEvent> one{{DenseVec::Zero(1), LossFamily::squared, 0.5}};
  const ComparatorResult r = best_comparator(ones(1), one, 1.0);
  EXPECT_NEAR(r.preds(0), 0.5, 1e-6);
  EXPECT_NEAR(r.total_loss, 0.0, 1e-10);

  harness::SyntheticSpec s;
  s.generator = harness::Generator::sixsix_adversary;
  s.horizon = 400;
  const auto ev = harness::generate_stream(s, 0);
  const ComparatorResult z = best_comparator(ones(400), ev, 1.0);
  EXPECT_NEAR(z.preds.cwiseAbs().maxCoeff(), 0.0, 1e-6);
  EXPECT_NEAR(z.total_loss, 400.0, 1e-6);
  EXPECT_NEAR(z.coeffs.sum(), 0.0, 1e-6);
}

TEST(Oracle, ComparatorFeasibleAndBeatsZero) {
  for (const LossFamily f : {LossFamily::squared, LossFamily::logistic, LossFamily::squared_hinge}) {
    harness::SyntheticSpec s;
    s.input_dim = 2;
    s.horizon = 150;
    s.loss = f;
    const auto ev = harness::generate_stream(s, 4);
    std::vector<Point> pts;
    for (const auto& e : ev) pts.push_back(e.point);
    const SymMat k = gram(KernelSpec::gaussian(1.0), pts);
    ComparatorOptions o;
    o.iterations = 1500;
    const ComparatorResult r = best_comparator(k, ev, 1.0, o);
    EXPECT_LE(r.preds.cwiseAbs().maxCoeff(), 1.0 + 1e-6);
    double zero = 0.0;
    for (const auto& e : ev) zero += loss_value(e, 0.0);
    EXPECT_LE(r.total_loss, zero);
    EXPECT_LT(r.total_loss, zero) << to_string(f);
    EXPECT_NEAR((k.matrix() * r.coeffs - r.preds).cwiseAbs().maxCoeff(), 0.0, 1e-6);
    EXPECT_NEAR(r.coeffs.dot(k.matrix() * r.coeffs), r.norm_sq, 1e-6 * (1.0 + r.norm_sq));
  }
}

TEST(Oracle, ConstantTargetComparatorBeatsRidge) {
  const Index n = 30;
  std::vector<LossEvent> ev;
  std::vector<Point> pts;
  const auto raw = support::random_matrix(1, n, 9);
  for (Index j = 0; j < n; ++j) {
    pts.push_back(raw.col(j));
    ev.push_back({raw.col(j), LossFamily::squared, 0.6});
  }
  const SymMat k = gram(KernelSpec::gaussian(1.0), pts);
  const DenseVec y = DenseVec::Constant(n, 0.6);
  // kernel ridge witness with a small ridge
  DenseMat shifted = k.matrix();
  shifted.diagonal().array() += 1e-3;
  const DenseVec fit = k.matrix() * support::gauss_jordan_inverse(shifted) * y;
  double ridge_loss = 0.0;
  for (Index t = 0; t < n; ++t) ridge_loss += (fit(t) - 0.6) * (fit(t) - 0.6);
  EXPECT_LE(best_comparator(k, ev, 1.0).total_loss, ridge_loss + 1e-9);
}

TEST(Oracle, SpectralAudit) {
  const SymMat a(support::random_psd(6, 6, 1) + DenseMat::Identity(6, 6));
  const SpectralBounds same = spectral_audit(a, a);
  EXPECT_NEAR(same.lo, 1.0, 1e-12);
  EXPECT_NEAR(same.hi, 1.0, 1e-12);
  const SpectralBounds half = spectral_audit(a, SymMat(0.5 * a.matrix()));
  EXPECT_NEAR(half.lo, 0.5, 1e-12);
  EXPECT_NEAR(half.hi, 0.5, 1e-12);
  EXPECT_THROW(spectral_audit(a, SymMat::identity(3)), DimensionMismatch);
}

TEST(Oracle, DualPairMatchesFeatureSpace) {
  // explicit features: compare generalized eigenvalues of
  // Phi W Phi^T + aI against Phi Phi^T + aI with the dual computation
  const DenseMat phi = support::random_matrix(4, 9, 12);
  DenseVec w(9);
  w << 0, 2, 0, 1.5, 1, 0, 3, 0, 1;
  const double alpha = 0.4;
  const SymMat kbar(phi.transpose() * phi);
  const auto [ex, sk] = dual_pair(kbar, w, alpha);
  const SpectralBounds dual = spectral_audit(ex, sk);

  DenseMat a = phi * phi.transpose();
  a.diagonal().array() += alpha;
  DenseMat b = phi * w.asDiagonal() * phi.transpose();
  b.diagonal().array() += alpha;
  const DenseMat ainv = support::gauss_jordan_inverse(a);
  const DenseMat m = ainv * b;  // same spectrum as A^{-1/2} B A^{-1/2}
  Eigen::EigenSolver<DenseMat> es(m);
  const DenseVec ev = es.eigenvalues().real();
  // the dual also carries the trivial eigenvalue 1 on the complement of the span
  EXPECT_NEAR(dual.lo, std::min(ev.minCoeff(), 1.0), 1e-9);
  EXPECT_NEAR(dual.hi, std::max(ev.maxCoeff(), 1.0), 1e-9);
}
