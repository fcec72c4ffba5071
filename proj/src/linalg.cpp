#include "koco/linalg.hpp"

#include <cmath>
#include <string>

#include "koco/error.hpp"
#include "koco/parallel.hpp"

namespace koco {

void require_finite(const Eigen::Ref<const DenseVec>& v, std::string_view what) {
  if (!v.allFinite())
    throw NonFiniteValue(std::string(what) + ": non-finite entry");
}

void require_finite(double x, std::string_view what) {
  if (!std::isfinite(x)) throw NonFiniteValue(std::string(what) + ": non-finite value");
}

SymMat::SymMat(DenseMat m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw DimensionMismatch("SymMat: matrix is " + std::to_string(m_.rows()) + "x" +
                            std::to_string(m_.cols()));
  if (!m_.allFinite()) throw NonFiniteValue("SymMat: non-finite entry");
  if (m_.size() > 0 && (m_ - m_.transpose()).cwiseAbs().maxCoeff() > tol)
    throw InvalidArgument("SymMat: asymmetry exceeds tolerance");
  m_ = (0.5 * (m_ + m_.transpose())).eval();
}

SymMat SymMat::zero(Index order) { return SymMat(DenseMat::Zero(order, order)); }
SymMat SymMat::identity(Index order) { return SymMat(DenseMat::Identity(order, order)); }

RegularizedInverse::RegularizedInverse(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidArgument("RegularizedInverse: alpha must be positive");
}

void RegularizedInverse::reserve(Index capacity) {
  if (capacity <= inv_.rows()) return;
  DenseMat inv(capacity, capacity);
  DenseMat m(capacity, capacity);
  inv.topLeftCorner(n_, n_) = inv_.topLeftCorner(n_, n_);
  m.topLeftCorner(n_, n_) = m_.topLeftCorner(n_, n_);
  inv_.swap(inv);
  m_.swap(m);
}

double RegularizedInverse::schur_complement(const DenseVec& cross, double diag) const {
  if (cross.size() != n_)
    throw DimensionMismatch("append: cross has length " + std::to_string(cross.size()) +
                            ", expected " + std::to_string(n_));
  if (n_ == 0) return diag + alpha_;
  return diag + alpha_ - quadratic_form(cross);
}

void RegularizedInverse::append(const DenseVec& cross, double diag) {
  require_finite(cross, "append cross");
  require_finite(diag, "append diag");
  if (cross.size() != n_)
    throw DimensionMismatch("append: cross has length " + std::to_string(cross.size()) +
                            ", expected " + std::to_string(n_));
  DenseVec w;
  double s = diag + alpha_;
  if (n_ > 0) {
    par::sym_matvec(inv_, n_, cross, w);
    s -= cross.dot(w);
  }
  if (!(s > kSchurRelTol * std::abs(diag + alpha_)))
    throw SchurNotPositive("append: Schur complement " + std::to_string(s) +
                           " at order " + std::to_string(n_));

  if (n_ + 1 > inv_.rows()) reserve(std::max<Index>(16, 2 * inv_.rows()));
  if (n_ > 0) {
    par::sym_rank1_update(inv_, n_, w, 1.0 / s);
    inv_.col(n_).head(n_) = -w / s;
    inv_.row(n_).head(n_) = -w.transpose() / s;
    m_.col(n_).head(n_) = cross;
    m_.row(n_).head(n_) = cross.transpose();
  }
  inv_(n_, n_) = 1.0 / s;
  m_(n_, n_) = diag;
  ++n_;

  if (++appends_since_refresh_ >= kRefreshInterval) refresh();
}

DenseVec RegularizedInverse::apply(const DenseVec& v) const {
  if (v.size() != n_) throw DimensionMismatch("apply: length mismatch");
  DenseVec out;
  par::sym_matvec(inv_, n_, v, out);
  return out;
}

double RegularizedInverse::quadratic_form(const DenseVec& v) const {
  if (n_ == 0) return 0.0;
  return v.dot(apply(v));
}

void RegularizedInverse::refresh() {
  appends_since_refresh_ = 0;
  if (n_ == 0) return;
  const SymMat m(DenseMat(m_.topLeftCorner(n_, n_)));
  inv_.topLeftCorner(n_, n_) = psd_inverse(m, alpha_);
}

double RegularizedInverse::audit() const {
  if (n_ == 0) return 0.0;
  DenseMat shifted = m_.topLeftCorner(n_, n_);
  shifted.diagonal().array() += alpha_;
  const DenseMat prod = inv_.topLeftCorner(n_, n_) * shifted;
  return (prod - DenseMat::Identity(n_, n_)).cwiseAbs().maxCoeff();
}

RegularizedInverse append_block_inverse(RegularizedInverse ri, const DenseVec& cross,
                                        double diag) {
  ri.append(cross, diag);
  return ri;
}

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
}

DenseMat dual_solve(const DenseMat& X, double alpha, const DenseMat& rhs) {
  DenseMat g = X.transpose() * X;
  g.diagonal().array() += alpha;
  Eigen::LLT<DenseMat> llt(g);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("dual system not PD");
  return llt.solve(rhs);
}

}  // namespace

DenseVec gram_shift_product(const DenseMat& X, double alpha, const DenseVec& v) {
  require_alpha(alpha);
  if (v.size() != X.rows()) throw DimensionMismatch("gram_shift_product: v length");
  if (X.cols() == 0) return v / alpha;
  const DenseVec inner = dual_solve(X, alpha, X.transpose() * v);
  return (v - X * inner) / alpha;
}

DenseMat primal_hat(const DenseMat& X, double alpha) {
  require_alpha(alpha);
  const DenseMat xxt = X * X.transpose();
  DenseMat shifted = xxt;
  shifted.diagonal().array() += alpha;
  // xxt * shifted^{-1} = (shifted^{-1} * xxt)^T since both are symmetric.
  Eigen::LLT<DenseMat> llt(shifted);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("primal system not PD");
  return llt.solve(xxt).transpose();
}

DenseMat dual_hat(const DenseMat& X, double alpha) {
  require_alpha(alpha);
  if (X.cols() == 0) return DenseMat::Zero(X.rows(), X.rows());
  return X * dual_solve(X, alpha, X.transpose());
}

DenseMat primal_shift_inverse(const DenseMat& X, double alpha) {
  require_alpha(alpha);
  DenseMat shifted = X * X.transpose();
  shifted.diagonal().array() += alpha;
  Eigen::LLT<DenseMat> llt(shifted);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("primal system not PD");
  return llt.solve(DenseMat::Identity(X.rows(), X.rows()));
}

DenseMat dual_shift_inverse(const DenseMat& X, double alpha) {
  const Index n = X.rows();
  return (DenseMat::Identity(n, n) - dual_hat(X, alpha)) / alpha;
}

DenseVec sym_eigvals(const SymMat& M) {
  if (M.order() == 0) return DenseVec();
  Eigen::SelfAdjointEigenSolver<DenseMat> es(M.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NoConvergence("sym_eigvals: solver did not converge");
  return es.eigenvalues();
}

DenseVec psd_solve(const SymMat& M, double alpha, const DenseVec& b) {
  if (b.size() != M.order()) throw DimensionMismatch("psd_solve: rhs length");
  if (alpha < 0.0) throw InvalidArgument("psd_solve: alpha must be non-negative");
  DenseMat shifted = M.matrix();
  shifted.diagonal().array() += alpha;
  Eigen::LLT<DenseMat> llt(shifted);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("psd_solve: M + alpha I not PD");
  return llt.solve(b);
}

DenseMat psd_inverse(const SymMat& M, double alpha) {
  DenseMat shifted = M.matrix();
  shifted.diagonal().array() += alpha;
  Eigen::LLT<DenseMat> llt(shifted);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("psd_inverse: M + alpha I not PD");
  DenseMat inv = llt.solve(DenseMat::Identity(M.order(), M.order()));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace koco
