#include "koco/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "koco/error.hpp"
#include "koco/rng.hpp"

namespace koco {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("oracle: alpha must be positive");
}

double loss_curvature(LossFamily f) {
  switch (f) {
    case LossFamily::squared: return 2.0;
    case LossFamily::logistic: return 0.25;
    case LossFamily::squared_hinge: return 2.0;
  }
  return 2.0;
}

}  // namespace

DenseVec exact_rls(const SymMat& K, double alpha) {
  require_alpha(alpha);
  const DenseMat inv = psd_inverse(K, alpha);
  // K (K + aI)^{-1} = I - a (K + aI)^{-1}
  return (DenseVec::Ones(K.order()) - alpha * inv.diagonal()).cwiseMax(0.0);
}

double effective_dimension(const SymMat& K, double alpha) {
  require_alpha(alpha);
  if (K.order() == 0) return 0.0;
  const DenseVec lam = sym_eigvals(K).cwiseMax(0.0);
  return (lam.array() / (lam.array() + alpha)).sum();
}

DenseVec online_rls(const SymMat& K, double alpha) {
  require_alpha(alpha);
  const Index n = K.order();
  DenseMat m = K.matrix();
  m.diagonal().array() += alpha;
  Eigen::LLT<DenseMat> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("online_rls: K + alpha I not positive definite");
  const DenseMat l = llt.matrixL();
  DenseVec tau(n);
  for (Index t = 0; t < n; ++t) tau(t) = std::max(0.0, 1.0 - alpha / (l(t, t) * l(t, t)));
  return tau;
}

double online_effective_dimension(const SymMat& K, double alpha) {
  return K.order() == 0 ? 0.0 : online_rls(K, alpha).sum();
}

LogdetChain logdet_chain(const SymMat& Kbar, double alpha) {
  require_alpha(alpha);
  LogdetChain c;
  if (Kbar.order() == 0) return c;
  const DenseVec lam = sym_eigvals(Kbar).cwiseMax(0.0);
  c.d_onl = online_effective_dimension(Kbar, alpha);
  c.logdet = (lam.array() / alpha).log1p().sum();
  c.d_eff = (lam.array() / (lam.array() + alpha)).sum();
  c.upper = c.d_eff * (1.0 + std::log(lam.maxCoeff() / alpha + 1.0));
  return c;
}

PrimalOnsTrace primal_ons(const std::vector<DenseVec>& features,
                          const std::vector<LossEvent>& events, const KonsConfig& cfg,
                          const std::vector<bool>* accept) {
  cfg.validate();
  if (features.size() != events.size()) throw DimensionMismatch("primal_ons: features and events differ in length");
  if (accept && accept->size() != events.size()) throw DimensionMismatch("primal_ons: mask length");
  PrimalOnsTrace out;
  if (features.empty()) return out;

  const Index d = features.front().size();
  for (const DenseVec& f : features) {
    if (f.size() != d) throw DimensionMismatch("primal_ons: feature dimension changed");
    if (std::abs(f.norm() - 1.0) > 1e-9) throw InvalidArgument("primal_ons: features must be unit norm");
  }
  const double C = cfg.clip_c;
  DenseMat a_inv = DenseMat::Identity(d, d) / cfg.alpha;
  DenseVec w = DenseVec::Zero(d);
  DenseVec g_prev = DenseVec::Zero(d);

  for (std::size_t t = 0; t < features.size(); ++t) {
    const DenseVec& phi = features[t];
    const DenseVec u = w - a_inv * g_prev;
    const double ybar = phi.dot(u);
    const DenseVec aphi = a_inv * phi;
    const double q = std::max(phi.dot(aphi), kQuadraticFloor);
    w = u - (clip_excess(ybar, C) / q) * aphi;
    const double yhat = clip_prediction(phi.dot(w), C);
    const double g = loss_derivative(events[t], yhat);

    out.ybar.push_back(ybar);
    out.yhat.push_back(yhat);
    out.gdot.push_back(g);

    g_prev = g * phi;
    const bool grow = accept ? (*accept)[t] : true;
    if (grow && g != 0.0) {
      const double eta = eta_at(cfg, t + 1);
      const DenseVec ag = a_inv * g_prev;
      a_inv -= (eta / (1.0 + eta * g_prev.dot(ag))) * ag * ag.transpose();
    }
  }
  return out;
}

ComparatorResult best_comparator(const SymMat& K, const std::vector<LossEvent>& events,
                                 double clip_c, const ComparatorOptions& opts) {
  const Index n = K.order();
  if (static_cast<std::size_t>(n) != events.size()) throw DimensionMismatch("best_comparator: K and events differ");
  if (!(clip_c > 0.0)) throw InvalidArgument("best_comparator: C must be positive");
  if (opts.ridge < 0.0) throw InvalidArgument("best_comparator: ridge must be non-negative");
  ComparatorResult best;
  best.coeffs = DenseVec::Zero(n);
  best.preds = DenseVec::Zero(n);
  if (n == 0) return best;

  Eigen::SelfAdjointEigenSolver<DenseMat> es(K.matrix());
  if (es.info() != Eigen::Success) throw NoConvergence("best_comparator: eigensolver failed");
  const DenseVec& lam = es.eigenvalues();
  const double lmax = std::max(lam.maxCoeff(), 0.0);

  Index r = 0;
  for (Index i = 0; i < n; ++i)
    if (lam(i) > opts.rank_tol * lmax && lam(i) > 0.0) ++r;
  const DenseMat u = es.eigenvectors().rightCols(r);
  const DenseVec sq = lam.tail(r).cwiseSqrt();
  const DenseMat b = u * sq.asDiagonal();  // y = B v, ||w||^2 = |v|^2

  const double curv = loss_curvature(events.front().family);
  const double ridge = opts.ridge;
  auto total_loss = [&](const DenseVec& y) {
    double s = 0.0;
    for (Index t = 0; t < n; ++t) s += loss_value(events[t], y(t));
    return s;
  };
  auto objective = [&](const DenseVec& y, const DenseVec& v) { return total_loss(y) + ridge * v.squaredNorm(); };
  auto grad_y = [&](const DenseVec& y) {
    DenseVec g(n);
    for (Index t = 0; t < n; ++t) g(t) = loss_derivative(events[t], y(t));
    return g;
  };

  const DenseVec zero_y = DenseVec::Zero(n);
  const double zero_obj = objective(zero_y, DenseVec::Zero(r));
  double best_obj = zero_obj;
  DenseVec best_v = DenseVec::Zero(r);
  DenseVec best_y = zero_y;
  if (r == 0) {
    best.total_loss = total_loss(zero_y);
    best.objective = zero_obj;
    return best;
  }

  const double step = 1.0 / (curv * lmax + 2.0 * ridge);
  CounterRng rng(sub_seed(opts.seed, "comparator"));

  // Accelerated gradient on the unconstrained iterate; each iterate is pulled
  // into the feasible set by rescaling and scored there.
  auto consider = [&](const DenseVec& v, const DenseVec& y) {
    const double m = y.cwiseAbs().maxCoeff();
    const double s = m > clip_c ? clip_c / m : 1.0;
    const DenseVec ys = s * y;
    const double obj = total_loss(ys) + ridge * s * s * v.squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best_v = s * v;
      best_y = ys;
    }
  };

  for (int rs = 0; rs < std::max(opts.restarts, 1); ++rs) {
    DenseVec v = DenseVec::Zero(r);
    if (rs > 0) {
      for (Index i = 0; i < r; ++i) v(i) = rng.normal();
      const DenseVec y0 = b * v;
      v *= clip_c / std::max(y0.cwiseAbs().maxCoeff(), 1e-300);
    }
    DenseVec v_prev = v;
    DenseVec y = b * v;
    consider(v, y);
    double prev = objective(y, v);
    int flat = 0;
    for (int it = 0; it < opts.iterations; ++it) {
      const double mom = static_cast<double>(it) / (it + 3.0);
      const DenseVec look = v + mom * (v - v_prev);
      const DenseVec g = b.transpose() * grad_y(b * look) + 2.0 * ridge * look;
      v_prev = v;
      v = look - step * g;
      y = b * v;
      consider(v, y);
      const double obj = objective(y, v);
      flat = std::abs(prev - obj) <= 1e-12 * (1.0 + std::abs(obj)) ? flat + 1 : 0;
      prev = obj;
      if (flat >= 20) break;
    }
  }

  if (best_obj >= zero_obj) {
    const DenseVec g0 = grad_y(zero_y);
    const double stat = g0.dot(K.matrix() * g0);
    if (stat > 1e-10 * (1.0 + std::abs(zero_obj)))
      throw NoProgress("best_comparator: no restart improved on the zero function");
  }

  best.coeffs = u * best_v.cwiseQuotient(sq);
  best.preds = best_y;
  best.norm_sq = best_v.squaredNorm();
  best.total_loss = total_loss(best_y);
  best.objective = best_obj;
  return best;
}

SpectralBounds spectral_audit(const SymMat& exact_dual, const SymMat& sketch_dual) {
  if (exact_dual.order() != sketch_dual.order()) throw DimensionMismatch("spectral_audit: orders differ");
  const Index n = exact_dual.order();
  if (n == 0) return {1.0, 1.0};
  Eigen::LLT<DenseMat> llt(exact_dual.matrix());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("spectral_audit: exact matrix not positive definite");
  const DenseMat l = llt.matrixL();
  // L^{-1} S L^{-T}
  DenseMat m = l.triangularView<Eigen::Lower>().solve(sketch_dual.matrix());
  m = l.triangularView<Eigen::Lower>().solve(m.transpose()).transpose();
  const DenseVec ev = sym_eigvals(SymMat(0.5 * (m + m.transpose()), 1e300));
  return {ev.minCoeff(), ev.maxCoeff()};
}

std::pair<SymMat, SymMat> dual_pair(const SymMat& Kbar, const DenseVec& weights, double alpha) {
  require_alpha(alpha);
  const Index n = Kbar.order();
  if (weights.size() != n) throw DimensionMismatch("dual_pair: weight count differs from order");
  Eigen::SelfAdjointEigenSolver<DenseMat> es(Kbar.matrix());
  if (es.info() != Eigen::Success) throw NoConvergence("dual_pair: eigensolver failed");
  const DenseVec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const DenseMat half = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  DenseMat exact = Kbar.matrix();
  exact.diagonal().array() += alpha;
  DenseMat sketch = half * weights.asDiagonal() * half;
  sketch = 0.5 * (sketch + sketch.transpose());
  sketch.diagonal().array() += alpha;
  return {SymMat(exact, 1e300), SymMat(sketch, 1e300)};
}

}  // namespace koco
