#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "koco/kernels.hpp"
#include "koco/kons.hpp"
#include "koco/losses.hpp"

namespace koco::harness {

enum class StreamSource { synthetic, csv };
enum class Generator { rkhs_target, sixsix_adversary, orthogonal_drift };
enum class LearnerKind { kons, skons, gd_baseline };

std::string to_string(Generator g);
std::string to_string(LearnerKind k);

struct SyntheticSpec {
  Generator generator = Generator::rkhs_target;
  std::size_t n_centers = 10;
  double noise_sd = 0.1;
  double spread = 10.0;
  std::size_t input_dim = 2;
  std::size_t horizon = 100;
  double clip_c = 1.0;
  LossFamily loss = LossFamily::squared;
  /// Bandwidth of the gaussian target function (rkhs-target).
  double target_bandwidth = 1.0;
};

struct ExperimentConfig {
  StreamSource source = StreamSource::synthetic;
  std::string csv_path;
  SyntheticSpec synthetic;

  KernelSpec kernel = KernelSpec::gaussian(1.0);
  LossFamily loss = LossFamily::squared;
  LearnerKind learner = LearnerKind::kons;
  /// 0 for csv means every row.
  std::size_t horizon = 0;

  double clip_c = 1.0;
  double alpha = 1.0;
  EtaMode eta_mode = EtaMode::fixed_sigma;
  std::optional<double> sigma;
  std::optional<double> lipschitz;

  double kors_epsilon = 0.5;
  std::optional<double> kors_beta;  // defaults to the threshold for (T, delta, eps)
  double kors_delta = 0.1;
  double gamma = 0.0;

  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "out";
  bool comparator = true;
  int comparator_iterations = 5000;
  int comparator_restarts = 10;
  bool record_timing = true;

  /// Curvature constants after filling defaults from the loss profile.
  KonsConfig kons_config() const;
  double resolved_beta(std::size_t horizon) const;
};

/// key = value lines; '#' starts a comment. Throws ParseError for malformed
/// lines and ConfigError for unknown keys or bad values. Relative csv paths
/// resolve against base_dir.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

}  // namespace koco::harness
