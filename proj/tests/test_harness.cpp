#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "koco/error.hpp"
#include "koco/harness/config.hpp"
#include "koco/harness/experiment.hpp"
#include "koco/harness/gd_baseline.hpp"
#include "koco/harness/stream.hpp"

using namespace koco;
using namespace koco::harness;

namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("koco-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string trace_text(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto ev = load_stream(cfg, seed);
  std::ostringstream os;
  write_trace(os, run_once(cfg, ev, seed).trace, cfg.record_timing);
  return os.str();
}

std::vector<double> column(const std::string& csv, std::size_t col) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t i = 0; i <= col; ++i) std::getline(row, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

TEST(Config, ParsesKeys) {
  const ExperimentConfig c = parse(
      "# comment\n"
      "stream = synthetic\n"
      "stream.generator = sixsix-adversary\n"
      "horizon = 50\n"
      "kernel = polynomial\n"
      "kernel.degree = 3\n"
      "loss = logistic\n"
      "learner = skons\n"
      "alpha = 2.5\n"
      "gamma = 0.25\n"
      "seeds = 4, 5,6\n"
      "comparator = off\n"
      "record_timing = off\n");
  EXPECT_EQ(c.synthetic.generator, Generator::sixsix_adversary);
  EXPECT_EQ(c.synthetic.horizon, 50u);
  EXPECT_EQ(c.loss, LossFamily::logistic);
  EXPECT_EQ(c.learner, LearnerKind::skons);
  EXPECT_DOUBLE_EQ(c.alpha, 2.5);
  EXPECT_DOUBLE_EQ(c.gamma, 0.25);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5, 6}));
  EXPECT_FALSE(c.comparator);
  EXPECT_FALSE(c.record_timing);
}

TEST(Config, Errors) {
  try {
    parse("alpha = 1\nthis line has no equals\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("alpha = 1\nalpha = 2\n"), ParseError);
  EXPECT_THROW(parse("alhpa = 1\n"), ConfigError);
  EXPECT_THROW(parse("alpha = -1\n"), ConfigError);
  EXPECT_THROW(parse("alpha = abc\n"), ConfigError);
  EXPECT_THROW(parse("gamma = 2\n"), ConfigError);
  EXPECT_THROW(parse("kernel = spline\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/koco.cfg"), ConfigError);
}

TEST(Config, CurvatureDefaultsFromLoss) {
  const KonsConfig k = parse("loss = squared\n").kons_config();
  EXPECT_DOUBLE_EQ(k.lipschitz, 4.0);
  EXPECT_DOUBLE_EQ(k.sigma, 0.125);
  const KonsConfig o = parse("sigma = 0.05\nlipschitz = 3\n").kons_config();
  EXPECT_DOUBLE_EQ(o.sigma, 0.05);
  EXPECT_DOUBLE_EQ(o.lipschitz, 3.0);
}

TEST(Stream, Deterministic) {
  SyntheticSpec s;
  s.horizon = 80;
  const auto a = generate_stream(s, 11), b = generate_stream(s, 11), c = generate_stream(s, 12);
  ASSERT_EQ(a.size(), 80u);
  bool differs = false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].point, b[t].point);
    EXPECT_EQ(a[t].target, b[t].target);
    EXPECT_LE(std::abs(a[t].target), 1.0);
    differs |= a[t].target != c[t].target;
  }
  EXPECT_TRUE(differs);
}

TEST(Stream, AdversaryTargets) {
  SyntheticSpec s;
  s.generator = Generator::sixsix_adversary;
  s.horizon = 4;
  s.clip_c = 2.0;
  const auto ev = generate_stream(s, 0);
  const double want[] = {2.0, -2.0, 2.0, -2.0};
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(ev[t].target, want[t]);
    EXPECT_EQ(ev[t].point, ev[0].point);
  }
}

TEST(Stream, CsvRoundTrip) {
  const fs::path dir = scratch("csv");
  SyntheticSpec s;
  s.horizon = 1000;
  s.input_dim = 3;
  const auto ev = generate_stream(s, 2);
  emit_csv((dir / "a.csv").string(), ev);
  const auto back = ingest_csv((dir / "a.csv").string(), LossFamily::squared, 1.0);
  ASSERT_EQ(back.size(), ev.size());
  for (std::size_t t = 0; t < ev.size(); ++t) {
    EXPECT_EQ(back[t].point, ev[t].point);
    EXPECT_EQ(back[t].target, ev[t].target);
  }
  fs::remove_all(dir);
}

TEST(Stream, CsvErrors) {
  const fs::path dir = scratch("csv-bad");
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream((dir / name).string()) << body;
    return (dir / name).string();
  };
  try {
    ingest_csv(write("label.csv", "f1,label\n0.5,1\n0.1,0\n"), LossFamily::logistic, 1.0);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(ingest_csv(write("short.csv", "f1,f2,target\n1,2\n"), LossFamily::squared, 1.0), ParseError);
  EXPECT_THROW(ingest_csv(write("range.csv", "f1,target\n0,1.5\n"), LossFamily::squared, 1.0),
               TargetOutOfRange);
  EXPECT_THROW(ingest_csv(write("nan.csv", "f1,target\nx,0.5\n"), LossFamily::squared, 1.0), ParseError);
  fs::remove_all(dir);
}

TEST(Experiment, TraceHeader) {
  ExperimentConfig c = parse("horizon = 3\ncomparator = off\n");
  const std::string text = trace_text(c, 0);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "t,ybar,yhat,loss,gdot,eta,tau_tilde,p_tilde,z,dict_size,rg_inc,step_micros");
}

TEST(Experiment, SingleRound) {
  for (const char* learner : {"kons", "skons", "gd-baseline"}) {
    ExperimentConfig c = parse(std::string("horizon = 1\ncomparator = off\nlearner = ") + learner + "\n");
    const auto ev = load_stream(c, 0);
    const RunResult r = run_once(c, ev, 0);
    ASSERT_EQ(r.trace.size(), 1u) << learner;
    EXPECT_EQ(r.trace[0].yhat, 0.0);
    EXPECT_DOUBLE_EQ(r.summary.cumulative_loss, loss_value(ev[0], 0.0));
  }
}

TEST(Experiment, DeterministicTraces) {
  for (const char* learner : {"kons", "skons", "gd-baseline"}) {
    ExperimentConfig c = parse(std::string("horizon = 120\ncomparator = off\nrecord_timing = off\n"
                                           "gamma = 0.2\nlearner = ") + learner + "\n");
    EXPECT_EQ(trace_text(c, 3), trace_text(c, 3)) << learner;
  }
}

TEST(Experiment, FullAcceptanceSketchMatchesExact) {
  ExperimentConfig k = parse("horizon = 150\ncomparator = off\nrecord_timing = off\n");
  ExperimentConfig s = parse("horizon = 150\ncomparator = off\nrecord_timing = off\nlearner = skons\ngamma = 1\n");
  const auto a = column(trace_text(k, 5), 2), b = column(trace_text(s, 5), 2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t t = 0; t < a.size(); ++t) EXPECT_NEAR(a[t], b[t], 1e-8);
}

TEST(Experiment, RegretDecomposition) {
  ExperimentConfig c = parse("horizon = 200\ncomparator.iterations = 1500\n");
  const auto ev = load_stream(c, 1);
  const RunResult r = run_once(c, ev, 1);
  ASSERT_TRUE(r.summary.has_comparator);
  ASSERT_TRUE(r.summary.has_decomposition);
  EXPECT_NEAR(r.summary.regret, r.summary.cumulative_loss - r.summary.comparator_loss, 1e-9);
  EXPECT_LE(r.summary.regret, r.summary.r_g + r.summary.r_d + 1e-8);
  ASSERT_TRUE(r.summary.has_bound);
  EXPECT_TRUE(r.summary.bound_pass);
}

TEST(Experiment, WritesSeedDirectories) {
  const fs::path dir = scratch("run");
  ExperimentConfig c = parse("horizon = 20\ncomparator = off\nseeds = 1,2\n");
  c.out_dir = dir.string();
  std::ostringstream log;
  EXPECT_EQ(run_experiment(c, log), 0);
  for (const char* s : {"seed-1", "seed-2"}) {
    EXPECT_TRUE(fs::exists(dir / s / "trace.csv"));
    EXPECT_TRUE(fs::exists(dir / s / "summary.txt"));
  }
  fs::remove_all(dir);
}

TEST(GdBaseline, ZeroDerivativeKeepsPredictor) {
  GdBaseline g(KernelSpec::gaussian(1.0), 1.0, 4.0);
  const Point x = DenseVec::Zero(1);
  const StepRecord r = g.step({x, LossFamily::squared, 0.0});
  EXPECT_TRUE(r.zero_derivative);
  EXPECT_EQ(g.predict(x), 0.0);
}

TEST(GdBaseline, SingleStepByHand) {
  GdBaseline g(KernelSpec::gaussian(1.0), 1.0, 4.0);
  const Point x = DenseVec::Zero(1);
  const LossEvent ev{x, LossFamily::squared, 0.5};
  const StepRecord r = g.step(ev);
  EXPECT_DOUBLE_EQ(r.eta, 0.25);
  const double c1 = -0.25 * loss_derivative(ev, 0.0);
  EXPECT_DOUBLE_EQ(g.coefficients()[0], c1);
  EXPECT_DOUBLE_EQ(g.predict(x), c1);
  Point y(1);
  y << 1.0;
  EXPECT_NEAR(g.predict(y), c1 * std::exp(-0.5), 1e-15);
}
