#include "koco/skons.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "koco/error.hpp"
#include "koco/oracle.hpp"
#include "koco/parallel.hpp"

namespace koco {

void SkonsConfig::validate() const {
  kons.validate();
  kors.validate();
  if (kons.eta_mode != EtaMode::fixed_sigma || !(kons.sigma > 0.0))
    throw InvalidArgument("skons: requires fixed-sigma step size with sigma > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("skons: gamma must lie in [0, 1]");
  if (kors.alpha != kons.alpha) throw InvalidArgument("skons: kors.alpha must equal alpha");
}

SkonsLearner::SkonsLearner(KernelSpec kernel, SkonsConfig cfg)
    : kernel_(kernel), cfg_(cfg), kors_(kernel, cfg.kors), coin_(cfg.coin_seed),
      e_inv_(cfg.kons.alpha) {
  cfg_.validate();
}

Prediction SkonsLearner::predict(const Point& x) const {
  kernel_.admit(x);
  if (!points_.empty() && x.size() != points_.front().size())
    throw DimensionMismatch("skons: point dimension changed");

  const Index n = static_cast<Index>(points_.size());
  const double alpha = cfg_.kons.alpha;
  Prediction p;
  p.t = points_.size() + 1;
  par::fill_vector(n, [&](Index i) { return kernel_.eval(points_[i], x); }, p.kernel_row);
  if (n == 0) {
    p.q = 1.0 / alpha;
    return p;
  }
  const Eigen::Map<const DenseVec> c(coef_.data(), n);
  p.kernel_dot = p.kernel_row.dot(c);

  const Index m = static_cast<Index>(sel_pos_.size());
  DenseVec dk_r(m), dkc_r(m);
  for (Index j = 0; j < m; ++j) {
    const Index i = sel_pos_[j];
    dk_r(j) = d_[i] * p.kernel_row(i);
    dkc_r(j) = d_[i] * kcoef_[i];
  }
  p.solved = m > 0 ? e_inv_.apply(dk_r) : DenseVec();
  p.ybar = (p.kernel_dot - (m > 0 ? dkc_r.dot(p.solved) : 0.0)) / alpha;
  p.q = (1.0 - (m > 0 ? dk_r.dot(p.solved) : 0.0)) / alpha;
  p.yhat = clip_prediction(p.ybar, cfg_.kons.clip_c);
  return p;
}

StepRecord SkonsLearner::observe(const LossEvent& ev, const Prediction& pred) {
  if (pred.t != points_.size() + 1)
    throw InvalidArgument("skons: prediction is stale (round " + std::to_string(pred.t) + ")");
  const std::size_t t = pred.t;
  const Index n = static_cast<Index>(points_.size());

  StepRecord rec;
  rec.t = t;
  rec.ybar = pred.ybar;
  rec.yhat = pred.yhat;
  rec.loss = loss_value(ev, pred.yhat);
  rec.gdot = loss_derivative(ev, pred.yhat);
  rec.eta = eta_at(cfg_.kons, t);
  rec.zero_derivative = rec.gdot == 0.0;

  const double g = rec.gdot;
  const double eta = rec.eta;
  const double d_t = g * std::sqrt(eta);
  const double q = std::max(pred.q, kQuadraticFloor);

  const KorsStep ks = kors_.step(ev.point, d_t);
  rec.tau = ks.tau_tilde;
  rec.p_tilde = std::max(std::min(cfg_.kors.beta * ks.tau_tilde, 1.0), cfg_.gamma);
  bool z = coin_.uniform() < rec.p_tilde;

  if (z) {
    const Index m = static_cast<Index>(sel_pos_.size());
    DenseVec cross(m);
    for (Index j = 0; j < m; ++j) cross(j) = d_t * d_[sel_pos_[j]] * pred.kernel_row(sel_pos_[j]);
    try {
      e_inv_.append(cross, d_t * d_t);
    } catch (const SchurNotPositive& e) {
      std::fprintf(stderr, "skons: round %zu acceptance dropped: %s\n", t, e.what());
      z = false;
      rec.rejected_append = true;
    }
  }
  rec.z = z;

  const double c_t =
      (z ? g * g * eta * pred.yhat : 0.0) - g - clip_excess(pred.ybar, cfg_.kons.clip_c) / q;
  require_finite(c_t, "skons coefficient");

  for (Index i = 0; i < n; ++i) kcoef_[i] += pred.kernel_row(i) * c_t;
  kcoef_.push_back(pred.kernel_dot + c_t);
  points_.push_back(ev.point);
  d_.push_back(d_t);
  coef_.push_back(c_t);
  accepted_.push_back(z);
  if (z) {
    selected_.push_back(t);
    sel_pos_.push_back(n);
  }
  p_min_ = std::min(p_min_, rec.p_tilde);

  const double qbar = d_t * d_t * q;
  rec.rg_increment = (z ? qbar / (1.0 + qbar) : qbar) / eta;
  rec.dict_size = selected_.size();
  return rec;
}

StepRecord SkonsLearner::step(const LossEvent& ev) {
  const auto start = std::chrono::steady_clock::now();
  const Prediction p = predict(ev.point);
  StepRecord rec = observe(ev, p);
  rec.elapsed = std::chrono::steady_clock::now() - start;
  return rec;
}

DenseVec SkonsLearner::d_scale() const {
  return Eigen::Map<const DenseVec>(d_.data(), static_cast<Index>(d_.size()));
}

DenseVec SkonsLearner::coefficients() const {
  return Eigen::Map<const DenseVec>(coef_.data(), static_cast<Index>(coef_.size()));
}

DenseVec SkonsLearner::acceptance() const {
  DenseVec a(static_cast<Index>(accepted_.size()));
  for (std::size_t i = 0; i < accepted_.size(); ++i) a(static_cast<Index>(i)) = accepted_[i] ? 1.0 : 0.0;
  return a;
}

SymMat SkonsLearner::rescaled_gram(std::size_t t) const {
  if (t > points_.size()) throw InvalidArgument("skons: checkpoint beyond rounds seen");
  const std::vector<Point> prefix(points_.begin(), points_.begin() + static_cast<long>(t));
  const SymMat k = gram(kernel_, prefix);
  const DenseVec d = d_scale().head(static_cast<Index>(t));
  return SymMat(d.asDiagonal() * k.matrix() * d.asDiagonal());
}

std::pair<double, double> SkonsLearner::sandwich_audit(std::size_t t) const {
  const SymMat kbar = rescaled_gram(t);
  const DenseVec w = acceptance().head(static_cast<Index>(t));
  const auto [exact, sketch] = dual_pair(kbar, w, cfg_.kons.alpha);
  const SpectralBounds b = spectral_audit(exact, sketch);
  return {b.lo, b.hi};
}

}  // namespace koco
