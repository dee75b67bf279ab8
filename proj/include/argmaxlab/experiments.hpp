#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "argmaxlab/harness.hpp"
#include "argmaxlab/sets.hpp"

namespace argmaxlab {

// Configuration problems (bad schema, unknown fields, invalid values) are
// reported distinctly from runtime failures: the CLI maps them to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  long long reps = 2000;
  long long limit_draws = 100000;
  int threads = 1;
  std::string out_dir;
  nlohmann::json design;  // kind-specific block, validated at dispatch
};

const std::vector<std::string>& experiment_kinds();

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig default_config(const std::string& kind);

// Schema and paper-anchor text for `describe`.  Throws ConfigError on an
// unknown kind.
std::string describe_kind(const std::string& kind);

// Built-in set families for pk-check runs; `name` is one of
// remark3 | remark3-intersected | break-1a | break-1b.
SetSequence make_pk_family(const std::string& name, double kappa, double lambda1,
                           double lambda2, double a);

nlohmann::json report_to_json(const MCReport& report);
nlohmann::json polyhedral_to_json(const PolyhedralSet& p);

void write_sample_csv(const std::string& path, const std::vector<double>& xs);
void write_ecdf_csv(const std::string& path, const std::vector<double>& xs);
void write_gridset_csv(const std::string& path, const GridSet& g);
void write_path_csv(const std::string& path, const PathSample& p);

// Runs the configured experiment, writes its artifacts under cfg.out_dir,
// and prints one summary line per comparison.  Returns the process exit
// code: 0 pass, 1 acceptance failure.  Throws ConfigError (exit 2) on
// invalid configuration and std::runtime_error (exit 1) on runtime failure.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace argmaxlab
