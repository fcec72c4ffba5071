#include "koco/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "koco/error.hpp"
#include "koco/kors.hpp"

namespace koco::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("config: " + key + " expects a real number, got '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: " + key + " expects a non-negative integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("config: " + key + " expects on/off, got '" + v + "'");
}

}  // namespace

std::string to_string(Generator g) {
  switch (g) {
    case Generator::rkhs_target: return "rkhs-target";
    case Generator::sixsix_adversary: return "sixsix-adversary";
    case Generator::orthogonal_drift: return "orthogonal-drift";
  }
  return "?";
}

std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::kons: return "kons";
    case LearnerKind::skons: return "skons";
    case LearnerKind::gd_baseline: return "gd-baseline";
  }
  return "?";
}

KonsConfig ExperimentConfig::kons_config() const {
  const CurvatureProfile prof = curvature_profile(loss, clip_c);
  KonsConfig k;
  k.clip_c = clip_c;
  k.alpha = alpha;
  k.eta_mode = eta_mode;
  k.sigma = sigma.value_or(prof.sigma);
  k.lipschitz = lipschitz.value_or(prof.lipschitz);
  return k;
}

double ExperimentConfig::resolved_beta(std::size_t t) const {
  if (kors_beta) return *kors_beta;
  return beta_threshold(std::max<std::size_t>(t, 1), kors_delta, kors_epsilon);
}

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config: expected key = value", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) throw ParseError("config: empty key or value", lineno);
    if (kv.count(key)) throw ParseError("config: duplicate key " + key, lineno);
    kv[key] = val;
  }

  std::string kernel_name = "gaussian";
  double bandwidth = 1.0, offset = 1.0;
  int degree = 2;
  std::string stream_kind = "synthetic";

  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> handlers = {
      {"stream", [&](auto&, auto& v) { stream_kind = v; }},
      {"stream.path", [&](auto&, auto& v) { cfg.csv_path = v; }},
      {"stream.generator",
       [&](auto& k, auto& v) {
         if (v == "rkhs-target") cfg.synthetic.generator = Generator::rkhs_target;
         else if (v == "sixsix-adversary") cfg.synthetic.generator = Generator::sixsix_adversary;
         else if (v == "orthogonal-drift") cfg.synthetic.generator = Generator::orthogonal_drift;
         else throw ConfigError("config: unknown " + k + " '" + v + "'");
       }},
      {"stream.n_centers", [&](auto& k, auto& v) { cfg.synthetic.n_centers = to_uint(k, v); }},
      {"stream.noise_sd", [&](auto& k, auto& v) { cfg.synthetic.noise_sd = to_real(k, v); }},
      {"stream.spread", [&](auto& k, auto& v) { cfg.synthetic.spread = to_real(k, v); }},
      {"stream.input_dim", [&](auto& k, auto& v) { cfg.synthetic.input_dim = to_uint(k, v); }},
      {"stream.target_bandwidth", [&](auto& k, auto& v) { cfg.synthetic.target_bandwidth = to_real(k, v); }},
      {"horizon", [&](auto& k, auto& v) { cfg.horizon = to_uint(k, v); }},
      {"kernel", [&](auto&, auto& v) { kernel_name = v; }},
      {"kernel.bandwidth", [&](auto& k, auto& v) { bandwidth = to_real(k, v); }},
      {"kernel.degree", [&](auto& k, auto& v) { degree = static_cast<int>(to_uint(k, v)); }},
      {"kernel.offset", [&](auto& k, auto& v) { offset = to_real(k, v); }},
      {"loss",
       [&](auto&, auto& v) {
         try {
           cfg.loss = loss_family_from_string(v);
         } catch (const Error& e) {
           throw ConfigError(std::string("config: ") + e.what());
         }
       }},
      {"learner",
       [&](auto& k, auto& v) {
         if (v == "kons") cfg.learner = LearnerKind::kons;
         else if (v == "skons") cfg.learner = LearnerKind::skons;
         else if (v == "gd-baseline") cfg.learner = LearnerKind::gd_baseline;
         else throw ConfigError("config: unknown " + k + " '" + v + "'");
       }},
      {"clip_c", [&](auto& k, auto& v) { cfg.clip_c = to_real(k, v); }},
      {"alpha", [&](auto& k, auto& v) { cfg.alpha = to_real(k, v); }},
      {"eta_mode",
       [&](auto& k, auto& v) {
         if (v == "fixed-sigma") cfg.eta_mode = EtaMode::fixed_sigma;
         else if (v == "inverse-sqrt") cfg.eta_mode = EtaMode::inverse_sqrt;
         else throw ConfigError("config: unknown " + k + " '" + v + "'");
       }},
      {"sigma", [&](auto& k, auto& v) { cfg.sigma = to_real(k, v); }},
      {"lipschitz", [&](auto& k, auto& v) { cfg.lipschitz = to_real(k, v); }},
      {"kors.epsilon", [&](auto& k, auto& v) { cfg.kors_epsilon = to_real(k, v); }},
      {"kors.beta", [&](auto& k, auto& v) { cfg.kors_beta = to_real(k, v); }},
      {"kors.delta", [&](auto& k, auto& v) { cfg.kors_delta = to_real(k, v); }},
      {"gamma", [&](auto& k, auto& v) { cfg.gamma = to_real(k, v); }},
      {"seed", [&](auto& k, auto& v) { cfg.seeds = {to_uint(k, v)}; }},
      {"seeds",
       [&](auto& k, auto& v) {
         cfg.seeds.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) cfg.seeds.push_back(to_uint(k, trim(item)));
         if (cfg.seeds.empty()) throw ConfigError("config: seeds is empty");
       }},
      {"out", [&](auto&, auto& v) { cfg.out_dir = v; }},
      {"comparator", [&](auto& k, auto& v) { cfg.comparator = to_bool(k, v); }},
      {"comparator.iterations", [&](auto& k, auto& v) { cfg.comparator_iterations = static_cast<int>(to_uint(k, v)); }},
      {"comparator.restarts", [&](auto& k, auto& v) { cfg.comparator_restarts = static_cast<int>(to_uint(k, v)); }},
      {"record_timing", [&](auto& k, auto& v) { cfg.record_timing = to_bool(k, v); }},
  };

  for (const auto& [key, val] : kv) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(key, val);
  }

  if (stream_kind == "synthetic") cfg.source = StreamSource::synthetic;
  else if (stream_kind == "csv") cfg.source = StreamSource::csv;
  else throw ConfigError("config: stream must be synthetic or csv");

  try {
    if (kernel_name == "gaussian") cfg.kernel = KernelSpec::gaussian(bandwidth);
    else if (kernel_name == "linear") cfg.kernel = KernelSpec::linear();
    else if (kernel_name == "polynomial") cfg.kernel = KernelSpec::polynomial(degree, offset);
    else throw ConfigError("config: unknown kernel '" + kernel_name + "'");
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (cfg.source == StreamSource::csv) {
    if (cfg.csv_path.empty()) throw ConfigError("config: stream = csv needs stream.path");
    std::filesystem::path p(cfg.csv_path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) throw ConfigError("config: no such file " + p.string());
    cfg.csv_path = p.string();
  } else {
    if (cfg.horizon == 0) cfg.horizon = 100;
    if (cfg.synthetic.input_dim == 0) throw ConfigError("config: stream.input_dim must be positive");
    if (cfg.synthetic.noise_sd < 0.0) throw ConfigError("config: stream.noise_sd must be non-negative");
    if (!(cfg.synthetic.target_bandwidth > 0.0)) throw ConfigError("config: stream.target_bandwidth must be positive");
  }
  cfg.synthetic.horizon = cfg.horizon;
  cfg.synthetic.clip_c = cfg.clip_c;
  cfg.synthetic.loss = cfg.loss;

  if (!(cfg.clip_c > 0.0)) throw ConfigError("config: clip_c must be positive");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw ConfigError("config: gamma must lie in [0, 1]");
  if (cfg.comparator_restarts < 1) throw ConfigError("config: comparator.restarts must be at least 1");
  try {
    cfg.kons_config().validate();
    if (cfg.learner == LearnerKind::skons) {
      if (cfg.eta_mode != EtaMode::fixed_sigma)
        throw ConfigError("config: skons needs eta_mode = fixed-sigma");
      KorsConfig kc{cfg.alpha, cfg.kors_epsilon, cfg.resolved_beta(cfg.horizon), cfg.kors_delta, 0};
      kc.validate();
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  const auto base = std::filesystem::path(path).parent_path();
  return parse_config(in, base.empty() ? "." : base.string());
}

}  // namespace koco::harness
