#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "koco/kons.hpp"
#include "koco/linalg.hpp"
#include "koco/losses.hpp"

namespace koco {

/// Diagonal of K (K + alpha I)^{-1}.
DenseVec exact_rls(const SymMat& K, double alpha);

/// Tr(K (K + alpha I)^{-1}) from the eigenvalues of K.
double effective_dimension(const SymMat& K, double alpha);

/// Leverage of point t within its own prefix, for every t. Read off one Cholesky
/// factor of K + alpha I: tau_t = 1 - alpha / L_tt^2.
DenseVec online_rls(const SymMat& K, double alpha);
double online_effective_dimension(const SymMat& K, double alpha);

struct LogdetChain {
  double d_onl = 0.0;
  double logdet = 0.0;  // log det(K/alpha + I)
  double upper = 0.0;   // d_eff (1 + log(||K|| / alpha + 1))
  double d_eff = 0.0;
};
LogdetChain logdet_chain(const SymMat& Kbar, double alpha);

struct PrimalOnsTrace {
  std::vector<double> ybar;
  std::vector<double> yhat;
  std::vector<double> gdot;
};

/// Explicit-feature online Newton step with a dense d x d inverse kept by
/// Sherman-Morrison updates. With an acceptance mask the preconditioner only
/// grows on accepted rounds (the sketched variant).
PrimalOnsTrace primal_ons(const std::vector<DenseVec>& features,
                          const std::vector<LossEvent>& events, const KonsConfig& cfg,
                          const std::vector<bool>* accept = nullptr);

struct ComparatorOptions {
  int iterations = 5000;
  int restarts = 10;
  std::uint64_t seed = 0;
  /// Adds ridge * ||w||^2 to the objective.
  double ridge = 0.0;
  /// Eigenvalues below rank_tol * lambda_max are dropped.
  double rank_tol = 1e-12;
};

struct ComparatorResult {
  DenseVec coeffs;
  DenseVec preds;
  double total_loss = 0.0;
  double norm_sq = 0.0;
  double objective = 0.0;
};

/// Best fixed clipped function in hindsight over the span of the stream.
ComparatorResult best_comparator(const SymMat& K, const std::vector<LossEvent>& events,
                                 double clip_c, const ComparatorOptions& opts = {});

struct SpectralBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Extreme eigenvalues of exact^{-1/2} sketch exact^{-1/2}.
SpectralBounds spectral_audit(const SymMat& exact_dual, const SymMat& sketch_dual);

/// Dual forms of A = Phi Phi^T + alpha I and its reweighted version
/// Phi W Phi^T + alpha I, restricted to the span of the features:
/// (Kbar + alpha I, Kbar^{1/2} W Kbar^{1/2} + alpha I).
std::pair<SymMat, SymMat> dual_pair(const SymMat& Kbar, const DenseVec& weights, double alpha);

}  // namespace koco
