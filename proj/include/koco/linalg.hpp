#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

namespace koco {

using DenseVec = Eigen::VectorXd;
using DenseMat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Throws NonFiniteValue naming `what` if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const DenseVec>& v, std::string_view what);
void require_finite(double x, std::string_view what);

/// Dense symmetric matrix. Construction rejects inputs that are asymmetric by more
/// than `tol` (absolute) and then stores the exactly symmetrized average.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(DenseMat m, double tol = 1e-12);

  static SymMat zero(Index order);
  static SymMat identity(Index order);

  Index order() const { return m_.rows(); }
  const DenseMat& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  DenseMat m_;
};

/// Maintains inv = (M + alpha I)^{-1} for a PSD matrix M that grows by one
/// bordered row/column at a time. M itself is tracked so the inverse can be
/// rebuilt from scratch, which happens automatically every kRefreshInterval appends.
class RegularizedInverse {
 public:
  static constexpr std::size_t kRefreshInterval = 512;
  /// Appends whose Schur complement falls below this fraction of (diag + alpha) are rejected.
  static constexpr double kSchurRelTol = 1e-12;

  explicit RegularizedInverse(double alpha);

  Index order() const { return n_; }
  double alpha() const { return alpha_; }
  auto inverse() const { return inv_.topLeftCorner(n_, n_); }
  auto tracked() const { return m_.topLeftCorner(n_, n_); }

  /// Schur complement diag + alpha - cross^T inv cross of the prospective append.
  double schur_complement(const DenseVec& cross, double diag) const;

  /// Borders M with (cross, diag). Throws SchurNotPositive and leaves the state
  /// unchanged when the complement is numerically non-positive.
  void append(const DenseVec& cross, double diag);

  DenseVec apply(const DenseVec& v) const;
  double quadratic_form(const DenseVec& v) const;

  /// Rebuilds inv from the tracked matrix by a fresh factorization.
  void refresh();

  /// max_ij |inv (M + alpha I) - I|_ij.
  double audit() const;

 private:
  void reserve(Index capacity);

  double alpha_;
  Index n_ = 0;
  std::size_t appends_since_refresh_ = 0;
  DenseMat inv_;
  DenseMat m_;
};

/// Value-semantics wrapper around RegularizedInverse::append.
RegularizedInverse append_block_inverse(RegularizedInverse ri, const DenseVec& cross,
                                        double diag);

/// (X X^T + alpha I)^{-1} v evaluated through the m x m dual system
/// (1/alpha)(v - X (X^T X + alpha I)^{-1} X^T v). X is n x m, columns are samples.
DenseVec gram_shift_product(const DenseMat& X, double alpha, const DenseVec& v);

/// Both sides of the push-through identity, for verification.
/// primal_hat = X X^T (X X^T + alpha I)^{-1}, dual_hat = X (X^T X + alpha I)^{-1} X^T.
DenseMat primal_hat(const DenseMat& X, double alpha);
DenseMat dual_hat(const DenseMat& X, double alpha);
/// (X X^T + alpha I)^{-1} directly, and via (1/alpha)(I - dual_hat).
DenseMat primal_shift_inverse(const DenseMat& X, double alpha);
DenseMat dual_shift_inverse(const DenseMat& X, double alpha);

/// All eigenvalues, ascending. Throws NoConvergence.
DenseVec sym_eigvals(const SymMat& M);

/// Solves (M + alpha I) x = b. Throws NotPositiveDefinite.
DenseVec psd_solve(const SymMat& M, double alpha, const DenseVec& b);
/// (M + alpha I)^{-1}.
DenseMat psd_inverse(const SymMat& M, double alpha);

}  // namespace koco
