#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

#include "koco/kernels.hpp"
#include "koco/linalg.hpp"
#include "koco/losses.hpp"

namespace koco {

enum class EtaMode { fixed_sigma, inverse_sqrt };

struct KonsConfig {
  double clip_c = 1.0;
  double alpha = 1.0;
  EtaMode eta_mode = EtaMode::fixed_sigma;
  double sigma = 0.0;
  double lipschitz = 1.0;

  void validate() const;
};

/// Step size of round t (1-based): sigma, or 1/(L C sqrt(t)).
double eta_at(const KonsConfig& cfg, std::size_t t);

/// Per-round trace shared by every learner.
struct StepRecord {
  std::size_t t = 0;
  double ybar = 0.0;
  double yhat = 0.0;
  double loss = 0.0;
  double gdot = 0.0;
  double eta = 0.0;
  /// Exact online leverage of the round's rescaled feature (KONS), or the KORS estimate.
  double tau = 0.0;
  double p_tilde = 1.0;
  bool z = true;
  std::size_t dict_size = 0;
  double rg_increment = 0.0;
  bool zero_derivative = false;
  /// Sketch acceptance converted to rejection after a failed inverse append.
  bool rejected_append = false;
  std::chrono::nanoseconds elapsed{0};
};

/// Result of the prediction half of a round. Carries the kernel row and the
/// solve against the current regularized inverse so the update can reuse them.
struct Prediction {
  std::size_t t = 0;
  double ybar = 0.0;
  double yhat = 0.0;
  DenseVec kernel_row;   // k(x_i, x_t) over the (selected) history
  DenseVec solved;       // (Kbar + alpha I)^{-1} (D k), restricted as the learner requires
  double kernel_dot = 0.0;  // k^T c
  double q = 0.0;        // phi_t^T A_{t-1}^{-1} phi_t
};

/// Exact kernelized online Newton step.
///
/// The learner keeps u_t = A_{t-1}^{-1} sum_s c_s phi_s with raw-feature
/// coefficients c_s = g_s^2 eta_s yhat_s - g_s - h(ybar_s)/q_s, where
/// q_s = phi_s^T A_{s-1}^{-1} phi_s. For g_s != 0 this is c_s = g_s sqrt(eta_s) b_s
/// with b_s the rescaled-feature coefficient; at g_s = 0 the rescaled column is
/// zero and c_s still carries the projection term exactly.
class KonsLearner {
 public:
  enum class Fault { none, flip_coefficient_sign };

  KonsLearner(KernelSpec kernel, KonsConfig cfg);

  Prediction predict(const Point& x) const;
  StepRecord observe(const LossEvent& ev, const Prediction& pred);
  /// predict + observe, timed with a monotonic clock.
  StepRecord step(const LossEvent& ev);

  std::size_t rounds() const { return points_.size(); }
  const KonsConfig& config() const { return cfg_; }
  const KernelSpec& kernel() const { return kernel_; }
  const std::vector<Point>& points() const { return points_; }
  /// Diagonal of D: g_i sqrt(eta_i).
  DenseVec d_scale() const;
  DenseVec etas() const;
  /// Raw-feature coefficients c.
  DenseVec coefficients() const;
  const RegularizedInverse& regularized_inverse() const { return reg_inv_; }

  /// D K D over all rounds seen.
  SymMat rescaled_gram() const;

  /// Max deviation of the cached K c from a from-scratch recomputation, and of
  /// the maintained inverse from the identity check.
  double audit_cache() const;
  double audit_inverse() const { return reg_inv_.audit(); }

  /// Deliberate corruption of the coefficient update, used to prove that the
  /// equivalence checks detect a broken learner.
  void inject_fault(Fault f) { fault_ = f; }

 private:
  KernelSpec kernel_;
  KonsConfig cfg_;
  std::vector<Point> points_;
  std::vector<double> d_;
  std::vector<double> eta_;
  std::vector<double> coef_;
  std::vector<double> kcoef_;  // (K c)_i
  RegularizedInverse reg_inv_;
  Fault fault_ = Fault::none;
};

struct RegretReport {
  double r_t = 0.0;
  double r_g = 0.0;
  double r_d = 0.0;
};

/// Regret of a trace against per-round comparator predictions y*_t, with
/// R_G = sum rg_increment and R_D = sum (eta_t z_t - sigma) g_t^2 (yhat_t - y*_t)^2.
/// Rounds with z = 0 did not grow the preconditioner and count with zero step.
RegretReport regret_report(const std::vector<StepRecord>& trace, const std::vector<LossEvent>& events,
                           const DenseVec& comparator_preds, double sigma);

/// q floor applied before dividing by phi^T A^{-1} phi.
inline constexpr double kQuadraticFloor = 1e-12;

}  // namespace koco
