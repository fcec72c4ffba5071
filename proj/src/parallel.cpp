#include "koco/parallel.hpp"

#include <omp.h>

namespace koco::par {

int max_threads() { return omp_get_max_threads(); }

void sym_matvec_serial(const Eigen::MatrixXd& A, Index n, const Eigen::VectorXd& v,
                       Eigen::VectorXd& out) {
  out.resize(n);
  for (Index j = 0; j < n; ++j) out(j) = A.col(j).head(n).dot(v.head(n));
}

void sym_matvec(const Eigen::MatrixXd& A, Index n, const Eigen::VectorXd& v,
                Eigen::VectorXd& out) {
  out.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index j = 0; j < n; ++j) out(j) = A.col(j).head(n).dot(v.head(n));
}

void sym_rank1_update_serial(Eigen::MatrixXd& A, Index n, const Eigen::VectorXd& w,
                             double scale) {
  for (Index j = 0; j < n; ++j) A.col(j).head(n) += (scale * w(j)) * w.head(n);
}

void sym_rank1_update(Eigen::MatrixXd& A, Index n, const Eigen::VectorXd& w,
                      double scale) {
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index j = 0; j < n; ++j) A.col(j).head(n) += (scale * w(j)) * w.head(n);
}

}  // namespace koco::par
