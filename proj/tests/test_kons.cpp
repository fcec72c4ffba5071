#include <gtest/gtest.h>

#include <cmath>

#include "koco/error.hpp"
#include "koco/harness/stream.hpp"
#include "koco/kons.hpp"
#include "koco/oracle.hpp"
#include "test_support.hpp"

using namespace koco;

namespace {

KonsConfig squared_cfg(double alpha = 1.0, EtaMode mode = EtaMode::fixed_sigma) {
  KonsConfig c;
  c.clip_c = 1.0;
  c.alpha = alpha;
  c.eta_mode = mode;
  c.sigma = 0.125;
  c.lipschitz = 4.0;
  return c;
}

std::vector<LossEvent> stream(std::size_t T, std::size_t dim, std::uint64_t seed,
                              LossFamily loss = LossFamily::squared) {
  harness::SyntheticSpec s;
  s.input_dim = dim;
  s.horizon = T;
  s.loss = loss;
  return harness::generate_stream(s, seed);
}

std::vector<DenseVec> unit_features(const std::vector<LossEvent>& ev) {
  std::vector<DenseVec> f;
  for (const LossEvent& e : ev) f.push_back(e.point.normalized());
  return f;
}

double max_rel_gap(KonsLearner& l, const std::vector<LossEvent>& ev, const PrimalOnsTrace& ref) {
  double worst = 0.0;
  for (std::size_t t = 0; t < ev.size(); ++t) {
    const Prediction p = l.predict(ev[t].point);
    worst = std::max(worst, std::abs(p.yhat - ref.yhat[t]) / std::max(1.0, std::abs(ref.yhat[t])));
    l.observe(ev[t], p);
  }
  return worst;
}

}  // namespace

TEST(Eta, Schedules) {
  KonsConfig c = squared_cfg();
  EXPECT_EQ(eta_at(c, 1), 0.125);
  EXPECT_EQ(eta_at(c, 999), 0.125);
  c.eta_mode = EtaMode::inverse_sqrt;
  c.lipschitz = 1.0;
  EXPECT_DOUBLE_EQ(eta_at(c, 4), 0.5);
  c.lipschitz = 2.0;
  EXPECT_DOUBLE_EQ(eta_at(c, 1), 0.5);
  EXPECT_THROW(eta_at(c, 0), InvalidArgument);
}

TEST(KonsConfig, Validation) {
  KonsConfig c = squared_cfg();
  c.sigma = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.eta_mode = EtaMode::inverse_sqrt;
  EXPECT_NO_THROW(c.validate());
  c.alpha = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Kons, EmptyHistoryPredictsZero) {
  KonsLearner l(KernelSpec::gaussian(1.0), squared_cfg());
  const Prediction p = l.predict(Point::Ones(2));
  EXPECT_EQ(p.ybar, 0.0);
  EXPECT_EQ(p.yhat, 0.0);
}

TEST(Kons, ScalarRecursionOnRepeatedPoint) {
  // One point seen three times: A_t is a scalar along phi, so the ONS
  // recursion is hand-computable.
  const KonsConfig c = squared_cfg();
  KonsLearner l(KernelSpec::gaussian(1.0), c);
  const Point x = Point::Zero(1);
  const double targets[] = {0.0, 1.0, -0.5};
  double w = 0.0, a = c.alpha, g_prev = 0.0;
  for (const double y : targets) {
    const double u = w - g_prev / a;
    const double h = clip_excess(u, c.clip_c);
    w = u - h;  // q = 1/a, projection onto [-C, C]
    const double yhat = w;
    const StepRecord r = l.step({x, LossFamily::squared, y});
    EXPECT_NEAR(r.ybar, u, 1e-14);
    EXPECT_NEAR(r.yhat, yhat, 1e-14);
    const double g = 2.0 * (yhat - y);
    EXPECT_NEAR(r.gdot, g, 1e-14);
    EXPECT_NEAR(r.rg_increment, g * g / (a + c.sigma * g * g), 1e-14);
    a += c.sigma * g * g;
    g_prev = g;
  }
}

TEST(Kons, MatchesPrimalBothSchedules) {
  const auto ev = stream(200, 5, 4);
  for (const EtaMode mode : {EtaMode::fixed_sigma, EtaMode::inverse_sqrt}) {
    const KonsConfig c = squared_cfg(1.0, mode);
    KonsLearner l(KernelSpec::linear(), c);
    const PrimalOnsTrace ref = primal_ons(unit_features(ev), ev, c);
    EXPECT_LT(max_rel_gap(l, ev, ref), 1e-6);
  }
}

TEST(Kons, MatchesPrimalWithZeroDerivativeRounds) {
  // squared-hinge has zero derivative whenever the margin is met, and a
  // zero target with a zero prediction hits exactly on the first round
  auto ev = stream(150, 3, 6, LossFamily::squared_hinge);
  KonsConfig c = squared_cfg(0.5);
  c.sigma = curvature_profile(LossFamily::squared_hinge, 1.0).sigma;
  c.lipschitz = 4.0;
  KonsLearner l(KernelSpec::linear(), c);
  const PrimalOnsTrace ref = primal_ons(unit_features(ev), ev, c);
  std::size_t zeros = 0;
  for (const double g : ref.gdot) zeros += g == 0.0;
  ASSERT_GT(zeros, 5u);
  EXPECT_LT(max_rel_gap(l, ev, ref), 1e-6);

  auto sq = stream(80, 3, 7);
  sq[0].target = 0.0;
  KonsLearner l2(KernelSpec::linear(), squared_cfg());
  const PrimalOnsTrace ref2 = primal_ons(unit_features(sq), sq, squared_cfg());
  EXPECT_EQ(ref2.gdot[0], 0.0);
  EXPECT_LT(max_rel_gap(l2, sq, ref2), 1e-6);
}

TEST(Kons, FaultInjectionBreaksEquivalence) {
  const auto ev = stream(60, 5, 4);
  KonsLearner l(KernelSpec::linear(), squared_cfg());
  l.inject_fault(KonsLearner::Fault::flip_coefficient_sign);
  const PrimalOnsTrace ref = primal_ons(unit_features(ev), ev, squared_cfg());
  EXPECT_GT(max_rel_gap(l, ev, ref), 1e-3);
}

TEST(Kons, PredictionsAlwaysClipped) {
  const auto ev = stream(200, 2, 8);
  KonsConfig c = squared_cfg(0.01);
  c.sigma = 2.0;  // aggressive steps overshoot the feasible interval
  KonsLearner l(KernelSpec::gaussian(0.5), c);
  std::size_t clipped = 0;
  for (const LossEvent& e : ev) {
    const StepRecord r = l.step(e);
    EXPECT_LE(std::abs(r.yhat), 1.0);
    EXPECT_EQ(r.yhat, r.ybar - clip_excess(r.ybar, 1.0));
    clipped += std::abs(r.ybar) > 1.0;
  }
  EXPECT_GT(clipped, 0u);
}

TEST(Kons, RgMatchesOracleLeverage) {
  const auto ev = stream(250, 2, 9);
  const KonsConfig c = squared_cfg();
  KonsLearner l(KernelSpec::gaussian(1.0), c);
  double rg = 0.0;
  for (const LossEvent& e : ev) rg += l.step(e).rg_increment;
  const DenseVec tau = online_rls(l.rescaled_gram(), c.alpha);
  EXPECT_NEAR(rg, tau.sum() / c.sigma, 1e-7);
}

TEST(Kons, CachedProductsSurviveAudit) {
  const auto ev = stream(600, 2, 10);
  KonsLearner l(KernelSpec::gaussian(1.0), squared_cfg());
  for (const LossEvent& e : ev) l.step(e);
  EXPECT_LT(l.audit_cache(), 1e-8);
  EXPECT_LT(l.audit_inverse(), 1e-8);
  EXPECT_EQ(l.regularized_inverse().order(), 600);
}

TEST(Kons, RawCoefficientsReproducePrediction) {
  // ybar = (k^T c - (D K c)^T (Kbar + alpha I)^{-1} D k) / alpha, also across gdot = 0 rounds
  const auto ev = stream(40, 2, 12);
  const KonsConfig c = squared_cfg();
  KonsLearner l(KernelSpec::gaussian(1.0), c);
  for (const LossEvent& e : ev) l.step(e);
  const DenseVec d = l.d_scale(), coef = l.coefficients();
  EXPECT_EQ(d.cwiseAbs().minCoeff(), 0.0);
  const DenseMat kk = gram(KernelSpec::gaussian(1.0), l.points()).matrix();
  DenseMat shifted = d.asDiagonal() * kk * d.asDiagonal();
  shifted.diagonal().array() += c.alpha;
  const DenseMat inv = support::gauss_jordan_inverse(shifted);
  for (const double v : {-0.7, 0.3, 1.1}) {
    const Point x = Point::Constant(2, v);
    const DenseVec k = cross_vector(KernelSpec::gaussian(1.0), l.points(), x);
    const double ybar = (k.dot(coef) - d.cwiseProduct(kk * coef).dot(inv * d.cwiseProduct(k))) / c.alpha;
    EXPECT_NEAR(l.predict(x).ybar, ybar, 1e-10);
  }
}

TEST(Kons, RejectsStalePredictionAndBadPoints) {
  KonsLearner l(KernelSpec::gaussian(1.0), squared_cfg());
  const LossEvent e{Point::Zero(2), LossFamily::squared, 0.5};
  const Prediction p = l.predict(e.point);
  l.observe(e, p);
  EXPECT_THROW(l.observe(e, p), InvalidArgument);
  EXPECT_THROW(l.predict(Point::Zero(3)), DimensionMismatch);
  Point bad = Point::Zero(2);
  bad(0) = std::nan("");
  EXPECT_THROW(l.predict(bad), NonFiniteValue);
}

TEST(RegretReport, Identities) {
  const auto ev = harness::generate_stream({harness::Generator::sixsix_adversary, 1, 0, 0, 1, 400, 1.0}, 0);
  KonsLearner l(KernelSpec::gaussian(1.0), squared_cfg());
  std::vector<StepRecord> trace;
  DenseVec own(static_cast<Index>(ev.size()));
  for (std::size_t t = 0; t < ev.size(); ++t) {
    trace.push_back(l.step(ev[t]));
    own(static_cast<Index>(t)) = trace.back().yhat;
  }
  EXPECT_NEAR(regret_report(trace, ev, own, 0.125).r_t, 0.0, 1e-12);
  const RegretReport zero = regret_report(trace, ev, DenseVec::Zero(own.size()), 0.125);
  EXPECT_LE(std::abs(zero.r_d), 1e-9);
  // one direction, so R_G is sum g_t^2 / (alpha + sigma sum_{s<=t} g_s^2) exactly
  double gs = 0.0, ref = 0.0;
  for (const StepRecord& s : trace) {
    gs += s.gdot * s.gdot;
    ref += s.gdot * s.gdot / (1.0 + 0.125 * gs);
  }
  EXPECT_NEAR(zero.r_g, ref, 1e-9);
  EXPECT_THROW(regret_report(trace, ev, DenseVec::Zero(3), 0.125), DimensionMismatch);
}
