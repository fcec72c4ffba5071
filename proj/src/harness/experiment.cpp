#include "koco/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "koco/error.hpp"
#include "koco/harness/gd_baseline.hpp"
#include "koco/harness/stream.hpp"
#include "koco/kors.hpp"
#include "koco/skons.hpp"

namespace koco::harness {

namespace {

std::vector<Point> points_of(const std::vector<LossEvent>& events) {
  std::vector<Point> p;
  p.reserve(events.size());
  for (const LossEvent& e : events) p.push_back(e.point);
  return p;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Step-path failure with the round attached.
[[noreturn]] void rethrow_at(std::size_t t, const Error& e) {
  throw Error("round " + std::to_string(t) + ": " + e.what());
}

}  // namespace

RunResult run_once(const ExperimentConfig& cfg, const std::vector<LossEvent>& events,
                   std::uint64_t seed, const ComparatorResult* comparator) {
  if (events.empty()) throw InvalidArgument("run: empty stream");
  for (const LossEvent& e : events) validate_event(e, cfg.clip_c);
  const KonsConfig kc = cfg.kons_config();
  const CurvatureProfile prof = curvature_profile(cfg.loss, cfg.clip_c);
  const std::size_t T = events.size();

  RunResult res;
  RunSummary& s = res.summary;
  s.learner = to_string(cfg.learner);
  s.seed = seed;
  s.rounds = T;
  res.trace.reserve(T);

  SymMat kbar;
  switch (cfg.learner) {
    case LearnerKind::kons: {
      KonsLearner l(cfg.kernel, kc);
      for (const LossEvent& e : events) {
        try {
          res.trace.push_back(l.step(e));
        } catch (const Error& err) {
          rethrow_at(l.rounds() + 1, err);
        }
      }
      s.dict_size = l.rounds();
      kbar = l.rescaled_gram();
      break;
    }
    case LearnerKind::skons: {
      SkonsConfig sc;
      sc.kons = kc;
      sc.kors = KorsConfig{cfg.alpha, cfg.kors_epsilon, cfg.resolved_beta(T), cfg.kors_delta,
                           sub_seed(seed, "kors")};
      sc.gamma = cfg.gamma;
      sc.coin_seed = sub_seed(seed, "skons-coin");
      SkonsLearner l(cfg.kernel, sc);
      for (const LossEvent& e : events) {
        try {
          res.trace.push_back(l.step(e));
        } catch (const Error& err) {
          rethrow_at(l.rounds() + 1, err);
        }
      }
      s.dict_size = l.selected().size();
      s.kors_dict_size = l.kors().dictionary().size();
      kbar = l.rescaled_gram(T);
      break;
    }
    case LearnerKind::gd_baseline: {
      GdBaseline l(cfg.kernel, cfg.clip_c, kc.lipschitz);
      for (const LossEvent& e : events) {
        try {
          res.trace.push_back(l.step(e));
        } catch (const Error& err) {
          rethrow_at(l.rounds() + 1, err);
        }
      }
      s.dict_size = l.rounds();
      break;
    }
  }

  double total_us = 0.0;
  for (const StepRecord& r : res.trace) {
    s.cumulative_loss += r.loss;
    const double us = std::chrono::duration<double, std::micro>(r.elapsed).count();
    total_us += us;
    s.max_step_micros = std::max(s.max_step_micros, us);
  }
  s.mean_step_micros = total_us / static_cast<double>(T);

  if (!cfg.comparator) return res;

  const SymMat k = gram(cfg.kernel, points_of(events));
  ComparatorOptions opts;
  opts.iterations = cfg.comparator_iterations;
  opts.restarts = cfg.comparator_restarts;
  opts.seed = sub_seed(seed, "comparator");
  res.comparator = comparator ? *comparator : best_comparator(k, events, cfg.clip_c, opts);
  s.has_comparator = true;
  s.comparator_loss = res.comparator.total_loss;
  s.norm_sq = res.comparator.norm_sq;
  s.regret = s.cumulative_loss - s.comparator_loss;

  if (cfg.learner == LearnerKind::gd_baseline) return res;

  s.has_decomposition = true;
  const double sigma_t = prof.sigma;
  const RegretReport rep = regret_report(res.trace, events, res.comparator.preds, sigma_t);
  s.r_g = rep.r_g;
  s.r_d = rep.r_d;

  const double L = kc.lipschitz;
  const double Td = static_cast<double>(T);
  const double fit = cfg.alpha * s.norm_sq;
  if (kc.eta_mode == EtaMode::fixed_sigma) {
    const double sig = kc.sigma;
    const double deff = effective_dimension(k, cfg.alpha / (sig * L * L));
    double denom = sig;
    if (cfg.learner == LearnerKind::skons) {
      const DenseVec tau = online_rls(kbar, cfg.alpha);
      denom = sig * std::max(cfg.gamma, cfg.resolved_beta(T) * tau.minCoeff());
    }
    s.bound = denom > 0.0 ? fit + 2.0 * deff * std::log(2.0 * sig * L * L * Td) / denom
                          : std::numeric_limits<double>::infinity();
  } else {
    const double deff = effective_dimension(k, cfg.alpha / (L * L));
    s.bound = fit + 4.0 * L * cfg.clip_c * std::sqrt(Td) * deff * std::log(2.0 * L * L * Td);
  }
  s.has_bound = true;
  s.bound_pass = s.regret <= s.bound;

  if (cfg.learner == LearnerKind::kons) {
    double drift = 0.0;
    for (const StepRecord& r : res.trace) drift += r.eta - sigma_t;
    const double d_onl = online_effective_dimension(kbar, cfg.alpha);
    s.general_bound = fit + d_onl / res.trace.back().eta +
                      4.0 * cfg.clip_c * cfg.clip_c * L * L * std::max(drift, 0.0);
    s.has_general_bound = true;
    s.general_bound_pass = s.regret <= s.general_bound;
  }
  return res;
}

void write_trace(std::ostream& out, const std::vector<StepRecord>& trace, bool record_timing) {
  out << kTraceHeader << '\n';
  char buf[512];
  for (const StepRecord& r : trace) {
    const double us = record_timing ? std::chrono::duration<double, std::micro>(r.elapsed).count() : 0.0;
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%zu,%.17g,%.17g\n",
                  r.t, r.ybar, r.yhat, r.loss, r.gdot, r.eta, r.tau, r.p_tilde, r.z ? 1 : 0,
                  r.dict_size, r.rg_increment, us);
    out << buf;
  }
}

void write_summary(std::ostream& out, const RunSummary& s) {
  out << "learner=" << s.learner << '\n'
      << "seed=" << s.seed << '\n'
      << "rounds=" << s.rounds << '\n'
      << "cumulative_loss=" << fmt(s.cumulative_loss) << '\n';
  if (s.has_comparator) {
    out << "comparator_loss=" << fmt(s.comparator_loss) << '\n'
        << "regret=" << fmt(s.regret) << '\n'
        << "norm_sq=" << fmt(s.norm_sq) << '\n';
  }
  if (s.has_decomposition) out << "r_g=" << fmt(s.r_g) << '\n' << "r_d=" << fmt(s.r_d) << '\n';
  out << "dict_size=" << s.dict_size << '\n';
  if (s.learner == "skons") out << "kors_dict_size=" << s.kors_dict_size << '\n';
  out << "mean_step_micros=" << fmt(s.mean_step_micros) << '\n'
      << "max_step_micros=" << fmt(s.max_step_micros) << '\n';
  if (s.has_bound)
    out << "regret_bound=" << fmt(s.bound) << '\n'
        << "regret_bound_pass=" << (s.bound_pass ? "true" : "false") << '\n';
  if (s.has_general_bound)
    out << "general_bound=" << fmt(s.general_bound) << '\n'
        << "general_bound_pass=" << (s.general_bound_pass ? "true" : "false") << '\n';
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  int status = 0;
  for (const std::uint64_t seed : cfg.seeds) {
    try {
      const std::vector<LossEvent> events = load_stream(cfg, seed);
      const RunResult res = run_once(cfg, events, seed);
      const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / ("seed-" + std::to_string(seed));
      std::filesystem::create_directories(dir);
      std::ofstream tr(dir / "trace.csv");
      write_trace(tr, res.trace, cfg.record_timing);
      std::ofstream sm(dir / "summary.txt");
      write_summary(sm, res.summary);
      if (!tr || !sm) throw Error("cannot write outputs under " + dir.string());
      log << "seed " << seed << ": " << res.summary.rounds << " rounds, loss "
          << fmt(res.summary.cumulative_loss);
      if (res.summary.has_comparator) log << ", regret " << fmt(res.summary.regret);
      log << " -> " << dir.string() << '\n';
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      log << "seed " << seed << ": failed: " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

}  // namespace koco::harness
