#include <CLI11.hpp>

#include <iostream>

#include "koco/error.hpp"
#include "koco/harness/config.hpp"
#include "koco/harness/experiment.hpp"
#include "koco/harness/stream.hpp"
#include "koco/harness/verify.hpp"

namespace h = koco::harness;

int main(int argc, char** argv) {
  CLI::App app{"kernel online Newton step experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "single seed, overrides the config");
  auto* out_opt = run->add_option("--out", out_dir, "output directory, overrides the config");

  std::string level = "fast";
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));

  std::string spec_path, csv_out;
  auto* gen = app.add_subcommand("gen", "write a synthetic stream as CSV");
  gen->add_option("--spec", spec_path, "config file describing the stream")->required();
  gen->add_option("--out", csv_out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      h::ExperimentConfig cfg = h::load_config(config_path);
      if (*seed_opt) cfg.seeds = {seed};
      if (*out_opt) cfg.out_dir = out_dir;
      return h::run_experiment(cfg, std::cout);
    }
    if (*verify) {
      const auto results = h::verify_suite(h::verify_level_from_string(level), std::cout);
      int failed = 0;
      for (const auto& r : results) failed += !r.pass;
      std::cout << "summary checks=" << results.size() << " failed=" << failed << '\n';
      return failed == 0 ? 0 : 1;
    }
    if (*gen) {
      const h::ExperimentConfig cfg = h::load_config(spec_path);
      if (cfg.source != h::StreamSource::synthetic) throw koco::ConfigError("gen: spec must describe a synthetic stream");
      const auto events = h::generate_stream(cfg.synthetic, cfg.seeds.front());
      h::emit_csv(csv_out, events);
      std::cout << "wrote " << events.size() << " events to " << csv_out << '\n';
      return 0;
    }
  } catch (const koco::ConfigError& e) {
    std::cerr << "koco: " << e.what() << '\n';
    return 2;
  } catch (const koco::ParseError& e) {
    std::cerr << "koco: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "koco: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
