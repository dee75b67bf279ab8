#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "argmaxlab/estimators.hpp"
#include "argmaxlab/stats.hpp"

namespace argmaxlab {

// Quantile levels reported for every compared sample.
inline constexpr double kReportQuantiles[] = {0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};
inline constexpr int kNumReportQuantiles = 7;

struct KsComparison {
  std::string name;
  double ks = 0.0;
  double tol = 1.0;
  bool pass = false;
  std::vector<double> quantiles_a;  // finite-sample side
  std::vector<double> quantiles_b;  // limit side
};

struct InvariantCheck {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
};

struct MCReport {
  std::string experiment_id;
  std::uint64_t base_seed = 0;
  long long reps = 0;
  long long limit_draws = 0;
  std::vector<KsComparison> comparisons;
  std::vector<InvariantCheck> invariants;
  long long tie_count = 0;
  double saturation_fraction = 0.0;
  bool saturation_warning = false;
  double wall_seconds = 0.0;
  // Raw sample vectors, emitted as single-column CSVs by the CLI.
  std::vector<std::pair<std::string, std::vector<double>>> samples;

  bool pass() const;
};

KsComparison compare_samples(std::string name, const std::vector<double>& finite,
                             const std::vector<double>& limit, double tol);

// Seed for the limit-sampler stream of a run, kept disjoint from the
// finite-sample replication stream.
inline std::uint64_t limit_stream_seed(std::uint64_t base_seed) {
  return mix64(base_seed ^ 0x517CC1B727220A95ULL);
}

// Corollary 1: v_T^2(k_hat - k0) vs. the constrained argmax of M.
// Interior designs add symmetry checks; NearEdge designs add the hard
// upper-bound invariants.
MCReport run_corollary1(const BreakDesign& design, long long reps, long long limit_N,
                        int threads = 1);

// Corollary 2: per-coordinate sqrt(n)(theta_hat - theta_n) vs. the
// polyhedral limit argmax, plus boundary-mass accounting.
MCReport run_corollary2(const BoundaryDesign& design, long long reps, long long limit_N,
                        int threads = 1);

// Corollary 3: the regime-appropriate rescaling of (beta_hat, pi_hat) vs. the
// simulated limit argmax, per coordinate.
MCReport run_corollary3(const WeakIdDesign& design, long long reps, long long limit_N,
                        int threads = 1);

// Value convergence: max_k V_T(k) - V_T(k0) vs. the maximum of simulated
// limit paths over the matching constraint.
MCReport run_value_convergence(const BreakDesign& design, long long reps, long long limit_N,
                               int threads = 1);

}  // namespace argmaxlab
