#include "koco/kons.hpp"

#include <cmath>
#include <string>

#include "koco/error.hpp"
#include "koco/parallel.hpp"

namespace koco {

void KonsConfig::validate() const {
  if (!(clip_c > 0.0)) throw InvalidArgument("kons: clip_c must be positive");
  if (!(alpha > 0.0)) throw InvalidArgument("kons: alpha must be positive");
  if (!(lipschitz > 0.0)) throw InvalidArgument("kons: lipschitz must be positive");
  if (sigma < 0.0) throw InvalidArgument("kons: sigma must be non-negative");
  if (eta_mode == EtaMode::fixed_sigma && !(sigma > 0.0))
    throw InvalidArgument("kons: fixed-sigma step size requires sigma > 0");
}

double eta_at(const KonsConfig& cfg, std::size_t t) {
  if (t < 1) throw InvalidArgument("eta_at: rounds are 1-based");
  if (cfg.eta_mode == EtaMode::fixed_sigma) return cfg.sigma;
  return 1.0 / (cfg.lipschitz * cfg.clip_c * std::sqrt(static_cast<double>(t)));
}

KonsLearner::KonsLearner(KernelSpec kernel, KonsConfig cfg)
    : kernel_(std::move(kernel)), cfg_(cfg), reg_inv_(cfg.alpha) {
  cfg_.validate();
}

Prediction KonsLearner::predict(const Point& x) const {
  kernel_.admit(x);
  if (!points_.empty() && x.size() != points_.front().size())
    throw DimensionMismatch("kons: point dimension changed");

  const Index n = static_cast<Index>(points_.size());
  Prediction p;
  p.t = points_.size() + 1;
  par::fill_vector(n, [&](Index i) { return kernel_.eval(points_[i], x); }, p.kernel_row);
  if (n == 0) {
    p.q = 1.0 / cfg_.alpha;
    return p;
  }
  const Eigen::Map<const DenseVec> d(d_.data(), n);
  const Eigen::Map<const DenseVec> c(coef_.data(), n);
  const Eigen::Map<const DenseVec> kc(kcoef_.data(), n);

  const DenseVec dk = d.cwiseProduct(p.kernel_row);
  p.solved = reg_inv_.apply(dk);
  p.kernel_dot = p.kernel_row.dot(c);
  p.ybar = (p.kernel_dot - d.cwiseProduct(kc).dot(p.solved)) / cfg_.alpha;
  p.q = (1.0 - dk.dot(p.solved)) / cfg_.alpha;
  p.yhat = clip_prediction(p.ybar, cfg_.clip_c);
  return p;
}

StepRecord KonsLearner::observe(const LossEvent& ev, const Prediction& pred) {
  if (pred.t != points_.size() + 1)
    throw InvalidArgument("kons: prediction is stale (round " + std::to_string(pred.t) +
                          ", expected " + std::to_string(points_.size() + 1) + ")");
  const std::size_t t = pred.t;
  const Index n = static_cast<Index>(points_.size());

  StepRecord rec;
  rec.t = t;
  rec.ybar = pred.ybar;
  rec.yhat = pred.yhat;
  rec.loss = loss_value(ev, pred.yhat);
  rec.gdot = loss_derivative(ev, pred.yhat);
  rec.eta = eta_at(cfg_, t);
  rec.zero_derivative = rec.gdot == 0.0;

  const double g = rec.gdot;
  const double eta = rec.eta;
  const double d_t = g * std::sqrt(eta);
  const double q = std::max(pred.q, kQuadraticFloor);
  double c_t = g * g * eta * pred.yhat - g - clip_excess(pred.ybar, cfg_.clip_c) / q;
  if (fault_ == Fault::flip_coefficient_sign) c_t = -c_t;
  require_finite(c_t, "kons coefficient");

  DenseVec cross = DenseVec::Zero(n);
  if (n > 0) {
    const Eigen::Map<const DenseVec> d(d_.data(), n);
    cross = d_t * d.cwiseProduct(pred.kernel_row);
  }
  reg_inv_.append(cross, d_t * d_t);

  for (Index i = 0; i < n; ++i) kcoef_[i] += pred.kernel_row(i) * c_t;
  kcoef_.push_back(pred.kernel_dot + c_t);

  points_.push_back(ev.point);
  d_.push_back(d_t);
  eta_.push_back(eta);
  coef_.push_back(c_t);

  const double qbar = d_t * d_t * q;
  rec.tau = qbar / (1.0 + qbar);
  rec.rg_increment = rec.tau / eta;
  rec.dict_size = points_.size();
  return rec;
}

StepRecord KonsLearner::step(const LossEvent& ev) {
  const auto start = std::chrono::steady_clock::now();
  const Prediction p = predict(ev.point);
  StepRecord rec = observe(ev, p);
  rec.elapsed = std::chrono::steady_clock::now() - start;
  return rec;
}

DenseVec KonsLearner::d_scale() const {
  return Eigen::Map<const DenseVec>(d_.data(), static_cast<Index>(d_.size()));
}

DenseVec KonsLearner::etas() const {
  return Eigen::Map<const DenseVec>(eta_.data(), static_cast<Index>(eta_.size()));
}

DenseVec KonsLearner::coefficients() const {
  return Eigen::Map<const DenseVec>(coef_.data(), static_cast<Index>(coef_.size()));
}

SymMat KonsLearner::rescaled_gram() const {
  const SymMat k = gram(kernel_, points_);
  const DenseVec d = d_scale();
  return SymMat(d.asDiagonal() * k.matrix() * d.asDiagonal());
}

double KonsLearner::audit_cache() const {
  if (points_.empty()) return 0.0;
  const SymMat k = gram(kernel_, points_);
  const DenseVec kc = k.matrix() * coefficients();
  const Eigen::Map<const DenseVec> cached(kcoef_.data(), static_cast<Index>(kcoef_.size()));
  return (kc - cached).cwiseAbs().maxCoeff();
}

RegretReport regret_report(const std::vector<StepRecord>& trace, const std::vector<LossEvent>& events,
                           const DenseVec& comparator_preds, double sigma) {
  if (trace.size() != events.size() || static_cast<Index>(trace.size()) != comparator_preds.size())
    throw DimensionMismatch("regret_report: trace, events and comparator differ in length");
  RegretReport r;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const StepRecord& s = trace[t];
    const double ystar = comparator_preds(static_cast<Index>(t));
    r.r_t += s.loss - loss_value(events[t], ystar);
    r.r_g += s.rg_increment;
    const double diff = s.yhat - ystar;
    r.r_d += ((s.z ? s.eta : 0.0) - sigma) * s.gdot * s.gdot * diff * diff;
  }
  return r;
}

}  // namespace koco
