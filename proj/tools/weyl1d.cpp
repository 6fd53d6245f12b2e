// Command-line driver for the weyl1d experiments.

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "weyl1d/experiment.hpp"
#include "weyl1d/fixtures.hpp"

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  std::string fixture;
  unsigned threads = 1;
  double tolerance_scale = 1.0;
};

void add_flags(CLI::App* cmd, GlobalFlags& g) {
  cmd->add_option("--config", g.config, "Experiment config (JSON, schema_version 1)");
  cmd->add_option("--out", g.out, "Output directory (overrides the config)");
  cmd->add_option("--threads", g.threads, "Worker threads for grid evaluations")->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance-scale", g.tolerance_scale, "Multiply every target tolerance by X")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fixture", g.fixture, "Built-in space to use when no config is given");
}

int run_task(const std::string& task, const GlobalFlags& g) {
  weyl1d::ExperimentConfig cfg;
  if (!g.config.empty()) {
    cfg = weyl1d::load_config(g.config);
    if (cfg.task != task) {
      std::cerr << "error: config task '" << cfg.task << "' does not match subcommand '" << task << "'\n";
      return weyl1d::kExitError;
    }
    if (!g.fixture.empty()) {
      std::cerr << "error: --fixture and --config are mutually exclusive\n";
      return weyl1d::kExitError;
    }
  } else {
    if (g.fixture.empty() && task != "abelian") {
      std::cerr << "error: give --config PATH or --fixture NAME (see 'weyl1d fixtures')\n";
      return weyl1d::kExitError;
    }
    if (!g.fixture.empty()) {
      const auto names = weyl1d::fixture_names();
      if (std::find(names.begin(), names.end(), g.fixture) == names.end()) {
        std::cerr << "error: unknown fixture '" << g.fixture << "' (see 'weyl1d fixtures')\n";
        return weyl1d::kExitError;
      }
    }
    cfg = weyl1d::fixture_config(task, g.fixture);
  }
  weyl1d::RunOptions opts;
  if (!g.out.empty()) opts.output = g.out;
  opts.threads = g.threads;
  opts.tolerance_scale = g.tolerance_scale;
  const weyl1d::RunResult r = weyl1d::run(cfg, opts);
  if (task == "convexity-check") std::cout << r.verdict_json;
  std::cout << (r.passed ? "PASS " : (r.exit_code == weyl1d::kExitTargetMiss ? "MISS " : "ERROR ")) << task << ": "
            << r.summary << "\n"
            << "artifacts: " << r.output_dir.string() << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weyl1d: Weyl-law experiments on one-dimensional weighted model spaces"};
  app.footer(weyl1d::exit_code_help() + "\nEnvironment:\n  WEYL1D_CACHE_DIR  directory for cached spectra\n");
  app.require_subcommand(1);

  GlobalFlags flags;
  std::string chosen;
  for (const std::string& task : weyl1d::task_names()) {
    CLI::App* cmd = app.add_subcommand(task, "Run the " + task + " experiment");
    add_flags(cmd, flags);
    cmd->callback([&chosen, task] { chosen = task; });
  }
  CLI::App* fixtures = app.add_subcommand("fixtures", "List the built-in model spaces");
  fixtures->callback([&chosen] { chosen = "fixtures"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : weyl1d::kExitError;
  }

  try {
    if (chosen == "fixtures") {
      std::cout << weyl1d::fixture_table();
      return weyl1d::kExitPass;
    }
    return run_task(chosen, flags);
  } catch (const weyl1d::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return weyl1d::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return weyl1d::kExitError;
  }
}
