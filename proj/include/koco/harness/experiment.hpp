#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "koco/harness/config.hpp"
#include "koco/kons.hpp"
#include "koco/oracle.hpp"

namespace koco::harness {

inline constexpr const char* kTraceHeader =
    "t,ybar,yhat,loss,gdot,eta,tau_tilde,p_tilde,z,dict_size,rg_inc,step_micros";

struct RunSummary {
  std::string learner;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  double cumulative_loss = 0.0;
  bool has_comparator = false;
  double comparator_loss = 0.0;
  double regret = 0.0;
  double norm_sq = 0.0;
  bool has_decomposition = false;
  double r_g = 0.0;
  double r_d = 0.0;
  std::size_t dict_size = 0;
  std::size_t kors_dict_size = 0;
  double mean_step_micros = 0.0;
  double max_step_micros = 0.0;
  /// Closed-form regret bound of the learner (NaN when not applicable).
  double bound = 0.0;
  bool has_bound = false;
  bool bound_pass = false;
  /// alpha ||w*||^2 + d_onl / eta_T + 4 C^2 L^2 sum (eta_t - sigma), exact KONS only.
  double general_bound = 0.0;
  bool has_general_bound = false;
  bool general_bound_pass = false;
};

struct RunResult {
  std::vector<StepRecord> trace;
  RunSummary summary;
  ComparatorResult comparator;
};

/// Runs the configured learner on one stream. Randomness comes from seed
/// through named sub-seeds. A precomputed comparator for the same events
/// skips the offline solve.
RunResult run_once(const ExperimentConfig& cfg, const std::vector<LossEvent>& events,
                   std::uint64_t seed, const ComparatorResult* comparator = nullptr);

void write_trace(std::ostream& out, const std::vector<StepRecord>& trace, bool record_timing);
void write_summary(std::ostream& out, const RunSummary& s);

/// For every seed: load the stream, run, write <out>/seed-<n>/trace.csv and
/// summary.txt. Returns 0, or 1 when any run failed.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace koco::harness
