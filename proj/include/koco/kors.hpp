#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "koco/kernels.hpp"
#include "koco/linalg.hpp"
#include "koco/rng.hpp"

namespace koco {

struct KorsConfig {
  double alpha = 1.0;
  double epsilon = 0.5;
  double beta = 1.0;
  double delta = 0.1;
  std::uint64_t rng_seed = 0;

  /// (1 + eps) / (1 - eps); infinite at eps = 1.
  double rho() const;
  void validate() const;
};

/// 3 log(T / delta) / eps^2, the budget above which the sampler's guarantees hold.
double beta_threshold(std::size_t horizon, double delta, double epsilon);

/// 3 rho beta d_onl / eps^2.
double dict_size_bound(double rho, double beta, double epsilon, double d_onl);
double dict_size_bound(const KorsConfig& cfg, double d_onl);

struct DictEntry {
  std::size_t index = 0;  // 1-based round
  double weight = 1.0;    // 1 / prob
  double prob = 1.0;
};

/// Weighted dictionary over rescaled kernel columns. The sub-inverse holds
/// (S^T Kbar S + alpha I)^{-1} with the 1/sqrt(p) weights folded into the columns.
class Dictionary {
 public:
  explicit Dictionary(double alpha) : sub_inv_(alpha) {}

  const std::vector<DictEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const RegularizedInverse& sub_inv() const { return sub_inv_; }
  const std::vector<Point>& points() const { return points_; }
  /// Per-member rescaling d_i (g_i sqrt(eta_i), or 1 for a plain kernel run).
  const std::vector<double>& scales() const { return scales_; }

  /// Rescaled kernel column of a candidate against the members, unweighted:
  /// d_i d k(x_i, x).
  DenseVec rescaled_column(const KernelSpec& k, const Point& x, double d) const;

  /// Column with member weights folded in: entry i scaled by 1/sqrt(p_i).
  DenseVec weighted_column(const DenseVec& kbar_col) const;

  /// Adds the candidate with probability p. kbar_col is the unweighted
  /// rescaled column against current members.
  void add(std::size_t index, double prob, const Point& x, double d, const DenseVec& kbar_col,
           double kbar_diag);

 private:
  std::vector<DictEntry> entries_;
  std::vector<Point> points_;
  std::vector<double> scales_;
  std::vector<double> inv_sqrt_p_;
  RegularizedInverse sub_inv_;
};

/// Estimated ridge leverage of the candidate with itself included at weight 1:
/// (1 + eps)/alpha (kbar_tt - kbar^T S (S^T Kbar S + alpha I)^{-1} S^T kbar).
/// Computed through the bordered Schur complement r = kbar_tt - c^T P^{-1} c of the
/// prior dictionary, giving (1 + eps) r / (alpha + r) without touching sub_inv.
double kors_estimate_rls(const Dictionary& dict, const DenseVec& kbar_col, double kbar_diag,
                         const KorsConfig& cfg);

struct KorsDraw {
  double p_tilde = 0.0;
  bool z = false;
};

/// p = min(beta tau, 1); one uniform is always consumed.
KorsDraw kors_sample(double tau_tilde, const KorsConfig& cfg, CounterRng& rng);

struct KorsStep {
  double tau_tilde = 0.0;
  double p_tilde = 0.0;
  bool z = false;
};

/// One independent run of the sampler over a stream.
class KorsSampler {
 public:
  KorsSampler(KernelSpec kernel, KorsConfig cfg);

  /// Processes the next point with rescaling d (1 for the plain kernel).
  KorsStep step(const Point& x, double d = 1.0);

  std::size_t rounds() const { return rounds_; }
  const Dictionary& dictionary() const { return dict_; }
  const KorsConfig& config() const { return cfg_; }

  /// Weight of each round seen so far: 1/p for members, 0 otherwise.
  DenseVec round_weights() const;
  DenseVec round_weights(std::size_t t) const;

 private:
  KernelSpec kernel_;
  KorsConfig cfg_;
  Dictionary dict_;
  CounterRng rng_;
  std::size_t rounds_ = 0;
};

}  // namespace koco
