#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "koco/kons.hpp"
#include "koco/kors.hpp"

namespace koco {

struct SkonsConfig {
  KonsConfig kons;
  KorsConfig kors;
  double gamma = 0.0;
  /// Key of the acceptance coin; the embedded sampler uses kors.rng_seed.
  std::uint64_t coin_seed = 0;

  void validate() const;
};

/// Online Newton step against the unweighted sketch
/// A~_t = alpha I + sum_s z_s eta g_s g_s^T, with acceptance probabilities
/// from an independent leverage-score sampler floored at gamma.
///
/// Same raw-feature coefficient layout as KonsLearner; the coefficient picks up
/// the z_t factor on the second-order term since A~ only grows on acceptance.
class SkonsLearner {
 public:
  SkonsLearner(KernelSpec kernel, SkonsConfig cfg);

  Prediction predict(const Point& x) const;
  StepRecord observe(const LossEvent& ev, const Prediction& pred);
  StepRecord step(const LossEvent& ev);

  std::size_t rounds() const { return points_.size(); }
  const SkonsConfig& config() const { return cfg_; }
  const std::vector<Point>& points() const { return points_; }
  /// 1-based rounds with z = 1.
  const std::vector<std::size_t>& selected() const { return selected_; }
  const KorsSampler& kors() const { return kors_; }
  const RegularizedInverse& e_inv() const { return e_inv_; }
  DenseVec d_scale() const;
  DenseVec coefficients() const;
  /// 0/1 acceptance per round.
  DenseVec acceptance() const;
  /// Smallest acceptance probability used so far (1 before any round).
  double p_min() const { return p_min_; }

  /// D K D over the first t rounds.
  SymMat rescaled_gram(std::size_t t) const;

  /// Extreme generalized eigenvalues of A~_t against A_t, computed in the dual.
  std::pair<double, double> sandwich_audit(std::size_t t) const;

 private:
  KernelSpec kernel_;
  SkonsConfig cfg_;
  KorsSampler kors_;
  CounterRng coin_;
  std::vector<Point> points_;
  std::vector<double> d_;
  std::vector<double> coef_;
  std::vector<double> kcoef_;
  std::vector<bool> accepted_;
  std::vector<std::size_t> selected_;  // 1-based
  std::vector<Index> sel_pos_;         // 0-based positions of selected_
  RegularizedInverse e_inv_;
  double p_min_ = 1.0;
};

}  // namespace koco
