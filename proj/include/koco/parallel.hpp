#pragma once

// Data-parallel inner loops shared by the learners and oracles. Every kernel has
// a plain serial reference next to its OpenMP version; the two must agree
// bit-for-bit because each output entry is produced by the same scalar code.

#include <Eigen/Dense>

namespace koco::par {

using Index = Eigen::Index;

/// Problems smaller than this run serially even when parallel execution is requested.
inline constexpr Index kParallelThreshold = 192;

int max_threads();

/// out = A[0:n, 0:n] * v for symmetric A, computed as column dot products.
void sym_matvec_serial(const Eigen::MatrixXd& A, Index n, const Eigen::VectorXd& v,
                       Eigen::VectorXd& out);
void sym_matvec(const Eigen::MatrixXd& A, Index n, const Eigen::VectorXd& v,
                Eigen::VectorXd& out);

/// A[0:n, 0:n] += scale * w * w^T (both triangles).
void sym_rank1_update_serial(Eigen::MatrixXd& A, Index n, const Eigen::VectorXd& w,
                             double scale);
void sym_rank1_update(Eigen::MatrixXd& A, Index n, const Eigen::VectorXd& w,
                      double scale);

/// out(i) = f(i) for i in [0, n).
template <class F>
void fill_vector_serial(Index n, F&& f, Eigen::VectorXd& out) {
  out.resize(n);
  for (Index i = 0; i < n; ++i) out(i) = f(i);
}

template <class F>
void fill_vector(Index n, F&& f, Eigen::VectorXd& out) {
  out.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) out(i) = f(i);
}

/// out(i, j) = out(j, i) = f(i, j) for j <= i; f is evaluated once per pair.
template <class F>
void fill_symmetric_serial(Index n, F&& f, Eigen::MatrixXd& out) {
  out.resize(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) out(i, j) = f(i, j);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) out(i, j) = out(j, i);
}

template <class F>
void fill_symmetric(Index n, F&& f, Eigen::MatrixXd& out) {
  out.resize(n, n);
#pragma omp parallel for schedule(dynamic, 8) if (n >= kParallelThreshold / 4)
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) out(i, j) = f(i, j);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) out(i, j) = out(j, i);
}

}  // namespace koco::par
