#include "koco/kors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "koco/error.hpp"
#include "koco/parallel.hpp"

namespace koco {

double KorsConfig::rho() const {
  if (epsilon >= 1.0) return std::numeric_limits<double>::infinity();
  return (1.0 + epsilon) / (1.0 - epsilon);
}

void KorsConfig::validate() const {
  if (!(alpha > 0.0)) throw InvalidArgument("kors: alpha must be positive");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidArgument("kors: epsilon must lie in [0, 1]");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("kors: beta must be finite and non-negative");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("kors: delta must lie in (0, 1)");
}

double beta_threshold(std::size_t horizon, double delta, double epsilon) {
  if (horizon == 0 || !(delta > 0.0) || !(epsilon > 0.0))
    throw InvalidArgument("beta_threshold: need T > 0, delta > 0, eps > 0");
  return 3.0 * std::log(static_cast<double>(horizon) / delta) / (epsilon * epsilon);
}

double dict_size_bound(double rho, double beta, double epsilon, double d_onl) {
  if (!(epsilon > 0.0)) throw InvalidArgument("dict_size_bound: eps must be positive");
  if (d_onl == 0.0) return 0.0;
  return 3.0 * rho * beta * d_onl / (epsilon * epsilon);
}

double dict_size_bound(const KorsConfig& cfg, double d_onl) {
  return dict_size_bound(cfg.rho(), cfg.beta, cfg.epsilon, d_onl);
}

DenseVec Dictionary::rescaled_column(const KernelSpec& k, const Point& x, double d) const {
  DenseVec col;
  par::fill_vector(static_cast<Index>(points_.size()),
                   [&](Index i) { return scales_[i] * d * k.eval(points_[i], x); }, col);
  return col;
}

DenseVec Dictionary::weighted_column(const DenseVec& kbar_col) const {
  if (kbar_col.size() != static_cast<Index>(entries_.size()))
    throw DimensionMismatch("dictionary: column length differs from member count");
  return kbar_col.cwiseProduct(
      Eigen::Map<const DenseVec>(inv_sqrt_p_.data(), static_cast<Index>(inv_sqrt_p_.size())));
}

void Dictionary::add(std::size_t index, double prob, const Point& x, double d,
                     const DenseVec& kbar_col, double kbar_diag) {
  if (!(prob > 0.0 && prob <= 1.0)) throw InvalidArgument("dictionary: prob must lie in (0, 1]");
  const double s = 1.0 / std::sqrt(prob);
  const DenseVec cross = weighted_column(kbar_col) * s;
  sub_inv_.append(cross, kbar_diag / prob);
  entries_.push_back({index, 1.0 / prob, prob});
  points_.push_back(x);
  scales_.push_back(d);
  inv_sqrt_p_.push_back(s);
}

double kors_estimate_rls(const Dictionary& dict, const DenseVec& kbar_col, double kbar_diag,
                         const KorsConfig& cfg) {
  const double alpha = cfg.alpha;
  double r = kbar_diag;
  if (dict.size() > 0) {
    const DenseVec c = dict.weighted_column(kbar_col);
    // c^T (P + alpha I)^{-1} c with P the weighted member gram
    r = kbar_diag - c.dot(dict.sub_inv().apply(c));
  }
  // r is alpha times the leverage against the prior dictionary; tiny negatives are roundoff
  r = std::max(r, 0.0);
  return (1.0 + cfg.epsilon) * r / (alpha + r);
}

KorsDraw kors_sample(double tau_tilde, const KorsConfig& cfg, CounterRng& rng) {
  if (tau_tilde < 0.0) throw InvalidArgument("kors_sample: negative leverage estimate");
  KorsDraw d;
  d.p_tilde = std::min(cfg.beta * tau_tilde, 1.0);
  const double u = rng.uniform();
  d.z = u < d.p_tilde;
  return d;
}

KorsSampler::KorsSampler(KernelSpec kernel, KorsConfig cfg)
    : kernel_(std::move(kernel)), cfg_(cfg), dict_(cfg.alpha), rng_(cfg.rng_seed) {
  cfg_.validate();
}

KorsStep KorsSampler::step(const Point& x, double d) {
  kernel_.admit(x);
  require_finite(d, "kors rescaling");
  ++rounds_;
  const DenseVec col = dict_.rescaled_column(kernel_, x, d);
  const double diag = d * d * kernel_.eval(x, x);

  KorsStep out;
  out.tau_tilde = kors_estimate_rls(dict_, col, diag, cfg_);
  const KorsDraw draw = kors_sample(out.tau_tilde, cfg_, rng_);
  out.p_tilde = draw.p_tilde;
  out.z = draw.z;
  if (out.z) dict_.add(rounds_, out.p_tilde, x, d, col, diag);
  return out;
}

DenseVec KorsSampler::round_weights() const { return round_weights(rounds_); }

DenseVec KorsSampler::round_weights(std::size_t t) const {
  if (t > rounds_) throw InvalidArgument("kors: checkpoint beyond rounds seen");
  DenseVec w = DenseVec::Zero(static_cast<Index>(t));
  for (const DictEntry& e : dict_.entries())
    if (e.index <= t) w(static_cast<Index>(e.index - 1)) = e.weight;
  return w;
}

}  // namespace koco
