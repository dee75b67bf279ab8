#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "argmaxlab/experiments.hpp"

namespace {

std::string kinds_list() {
  std::string s;
  for (const auto& k : argmaxlab::experiment_kinds()) {
    if (!s.empty()) s += " | ";
    s += k;
  }
  return s;
}

int env_threads() {
  const char* v = std::getenv("ARGMAXLAB_THREADS");
  if (!v) return 1;
  const int t = std::atoi(v);
  return t >= 1 ? t : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"argmaxlab: numerical laboratory for constrained argmax limits.\n"
               "Experiment kinds: " + kinds_list()};
  app.require_subcommand(1);

  std::string config_path, kind, out_dir, family;
  std::uint64_t seed = 0;
  long long reps = -1, limit_draws = -1;
  int threads = -1;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config or a kind");
  run->add_option("--config", config_path, "JSON experiment config");
  run->add_option("--kind", kind, "experiment kind (" + kinds_list() + ")");
  run->add_option("--seed", seed, "base seed override");
  run->add_option("--reps", reps, "finite-sample replication count override");
  run->add_option("--limit-draws", limit_draws, "limit-sampler draw count override");
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--threads", threads,
                  "worker thread count (overrides ARGMAXLAB_THREADS)");
  run->add_option("--family", family, "pk-check set family");

  std::string describe_kind_name;
  CLI::App* describe = app.add_subcommand("describe", "print the config schema of a kind");
  describe->add_option("kind", describe_kind_name, "experiment kind")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (describe->parsed()) {
      std::cout << argmaxlab::describe_kind(describe_kind_name);
      return 0;
    }
    argmaxlab::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = argmaxlab::load_config_file(config_path);
      if (!kind.empty() && kind != cfg.kind) {
        throw argmaxlab::ConfigError("--kind disagrees with the config file");
      }
    } else if (!kind.empty()) {
      cfg = argmaxlab::default_config(kind);
    } else {
      throw argmaxlab::ConfigError("run needs --config or --kind");
    }
    if (run->count("--seed")) cfg.seed = seed;
    if (reps > 0) cfg.reps = reps;
    if (limit_draws > 0) cfg.limit_draws = limit_draws;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.threads = threads >= 1 ? threads : (cfg.threads > 1 ? cfg.threads : env_threads());
    if (!family.empty()) {
      if (cfg.kind != "pk-check") {
        throw argmaxlab::ConfigError("--family applies only to pk-check");
      }
      cfg.design["family"] = family;
    }
    return argmaxlab::run_experiment(cfg, std::cout);
  } catch (const argmaxlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
