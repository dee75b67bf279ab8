#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "argmaxlab/rng.hpp"
#include "argmaxlab/sets.hpp"

namespace argmaxlab {

inline constexpr double kTieTol = 1e-12;

// Stochastic-process realization on a finite s-grid.
struct PathSample {
  std::vector<double> grid;    // strictly increasing
  std::vector<double> values;  // same length
  std::uint64_t seed = 0;
  std::string process_id;
};

// Vector-valued path: values[j] is the process value at grid[j].
struct VectorPathSample {
  std::vector<double> grid;
  std::vector<Eigen::VectorXd> values;
  std::uint64_t seed = 0;
  std::string process_id;
};

// Ingredients of the two-sided limit process: drift matrices Q_i, increment
// covariances Omega_i, and the break direction delta0.
class GaussianSpec {
 public:
  GaussianSpec(Eigen::MatrixXd omega1, Eigen::MatrixXd omega2,
               Eigen::MatrixXd q1, Eigen::MatrixXd q2, Eigen::VectorXd delta0);

  int dim() const { return static_cast<int>(delta0_.size()); }
  const Eigen::MatrixXd& omega1() const { return omega1_; }
  const Eigen::MatrixXd& omega2() const { return omega2_; }
  const Eigen::MatrixXd& q1() const { return q1_; }
  const Eigen::MatrixXd& q2() const { return q2_; }
  const Eigen::VectorXd& delta0() const { return delta0_; }
  const Eigen::MatrixXd& chol_omega1() const { return chol1_; }
  const Eigen::MatrixXd& chol_omega2() const { return chol2_; }

  double drift1() const { return drift1_; }  // delta0' Q1 delta0
  double drift2() const { return drift2_; }
  double noise_var1() const { return nv1_; }  // (2 delta0)' Omega1 (2 delta0)
  double noise_var2() const { return nv2_; }

 private:
  Eigen::MatrixXd omega1_, omega2_, q1_, q2_;
  Eigen::VectorXd delta0_;
  Eigen::MatrixXd chol1_, chol2_;
  double drift1_, drift2_, nv1_, nv2_;
};

// Quadratic limit objective M(h) = h'Z - (1/2) h'Vh, Z ~ N(z_mean, z_cov).
class QuadraticLimit {
 public:
  QuadraticLimit(Eigen::MatrixXd V, Eigen::MatrixXd z_cov, Eigen::VectorXd z_mean);

  int dim() const { return static_cast<int>(z_mean_.size()); }
  const Eigen::MatrixXd& V() const { return V_; }
  const Eigen::MatrixXd& z_cov() const { return z_cov_; }
  const Eigen::VectorXd& z_mean() const { return z_mean_; }
  Eigen::VectorXd draw_z(Rng& rng) const;

 private:
  Eigen::MatrixXd V_, z_cov_;
  Eigen::VectorXd z_mean_;
  Eigen::MatrixXd chol_;  // z_cov = chol chol'
};

// Gaussian increments on the given grid: B(0) = 0,
// B(t_{j+1}) - B(t_j) ~ N(0, (t_{j+1} - t_j) Omega), independent across j.
VectorPathSample sample_scaled_bm(const std::vector<double>& grid,
                                  const Eigen::MatrixXd& omega, std::uint64_t seed);

// Two-sided limit path on the symmetric grid {-C, ..., 0, ..., C}:
//   M(s) = -|s| delta0'Q1 delta0 + 2 delta0'B1(|s|)   for s <= 0,
//   M(s) = -s   delta0'Q2 delta0 + 2 delta0'B2(s)     for s >  0,
// with B1 and B2 independent.  Optional hooks force either B path to zero.
struct LimitProcessOptions {
  bool zero_b1 = false;
  bool zero_b2 = false;
};
PathSample limit_process_M(const GaussianSpec& spec, double C, double step,
                           std::uint64_t seed, const LimitProcessOptions& opts = {});

// Constraint over the s axis for argmax extraction.
struct FullLine {};
struct UpperBound { double a; };  // (-inf, a]
using ArgmaxConstraint = std::variant<FullLine, UpperBound, GridSet>;

struct ArgmaxResult {
  double s = 0.0;
  double value = 0.0;
  bool tie = false;
};

// Grid argmax over the constrained path; ties within kTieTol break to the
// smallest s and are flagged.
ArgmaxResult argmax_over(const PathSample& path, const ArgmaxConstraint& constraint);

struct LimitArgmaxSample {
  std::vector<double> argmax;  // N draws of s*
  std::vector<double> value;   // matching maxima M(s*)
  double saturation_fraction = 0.0;  // draws within one step of the +-C truncation
  long long tie_count = 0;
  bool saturation_warning = false;
  double C = 0.0;
  double step = 0.0;
};

struct LimitSamplerConfig {
  long long draws = 100000;
  double C = 0.0;       // <= 0: default 40 / min(drift1, drift2)
  double step = 0.01;
  double saturation_threshold = 1e-3;
  int threads = 1;
};

// N independent draws of the constrained argmax of freshly simulated limit
// paths.  The heavy loop samples the scalar projection 2 delta0'B_i directly
// (the same law as the vector construction) with one normal per grid step.
LimitArgmaxSample sample_limit_argmax(const GaussianSpec& spec,
                                      const ArgmaxConstraint& constraint,
                                      std::uint64_t seed,
                                      const LimitSamplerConfig& cfg);

// Unique maximizer of h'Z - (1/2) h'Vh over a polyhedral set with a
// certified KKT residual.
struct PolyhedralArgmax {
  Eigen::VectorXd h;
  double value = 0.0;
  double kkt_residual = 0.0;
  double comp_slackness = 0.0;
};
PolyhedralArgmax polyhedral_argmax(const QuadraticLimit& q, const Eigen::VectorXd& z_draw,
                                   const PolyhedralSet& p);

struct PolyhedralLimitSample {
  std::vector<Eigen::VectorXd> draws;
  std::vector<double> values;
  double max_kkt_residual = 0.0;
};
PolyhedralLimitSample sample_polyhedral_limit(const QuadraticLimit& q,
                                              const PolyhedralSet& p, long long N,
                                              std::uint64_t seed, int threads = 1);

}  // namespace argmaxlab
