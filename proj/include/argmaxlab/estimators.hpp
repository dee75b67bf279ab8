#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "argmaxlab/process.hpp"
#include "argmaxlab/sets.hpp"

namespace argmaxlab {

// ---------------------------------------------------------------------------
// Break-date estimation: y_t = x_t'beta + eps_t before the break and
// y_t = x_t'(beta + delta_T) + eps_t after, delta_T = delta0 * vT.
// ---------------------------------------------------------------------------

enum class BreakRegime {
  Interior,  // k0 / T -> tau strictly inside the trimming interval
  NearEdge,  // vT^2 (lambda2 T - k0) -> a
};

struct BreakDesign {
  long long T = 2000;
  BreakRegime regime = BreakRegime::Interior;
  double tau = 0.5;  // Interior
  double a = 0.0;    // NearEdge: k0 = floor(lambda2 T - a vT^-2)
  Eigen::VectorXd beta;
  Eigen::VectorXd delta0;  // nonzero
  double kappa = 0.25;     // vT = T^-kappa, kappa in (0, 1/2)
  double lambda1 = 0.15;
  double lambda2 = 0.85;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  int p() const { return static_cast<int>(beta.size()); }
  double vT() const;
  long long k0() const;
  long long trim_lo() const;  // floor(lambda1 T)
  long long trim_hi() const;  // floor(lambda2 T)
  void validate() const;

  // Limit-process ingredients implied by the default generators
  // (x iid N(0, I), eps iid N(0, sd^2)): Q_i = I, Omega_i = sd^2 I.
  GaussianSpec limit_spec() const;
};

struct BreakData {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;  // T x p
};

BreakData simulate_break_data(const BreakDesign& design);
BreakData simulate_break_data(const BreakDesign& design, std::uint64_t seed);

// V_T(k) and the SSR oracle, backed by cumulative cross-products so a full
// profile over Lambda_T costs O(T p^2 + |Lambda_T| p^3).
class BreakObjective {
 public:
  explicit BreakObjective(const BreakData& data);

  long long T() const { return T_; }
  int p() const { return p_; }

  double v_t(long long k) const;  // delta_k'(Z'MZ)delta_k
  double ssr_regression_only() const { return ssr0_; }  // y on x, no break

  // Independent route: solves the stacked (x, z_k) normal equations directly.
  double ssr_direct(long long k) const;

 private:
  long long T_;
  int p_;
  std::vector<Eigen::MatrixXd> cum_xx_;  // S_k
  std::vector<Eigen::VectorXd> cum_xy_;  // r_k
  double yy_;
  double ssr0_;
  Eigen::LDLT<Eigen::MatrixXd> st_ldlt_;
  Eigen::VectorXd st_inv_rt_;  // S_T^{-1} r_T
};

struct BreakFitResult {
  long long k_hat = 0;
  double s_hat = 0.0;  // vT^2 (k_hat - k0)
  bool tie = false;
  std::vector<long long> k_grid;
  std::vector<double> v_profile;
};

double v_t_objective(long long k, const BreakObjective& obj);
BreakFitResult estimate_break(const BreakData& data, const BreakDesign& design);

// M_T(s) = V_T(floor(k0 + s vT^-2)) - V_T(k0) tabulated on s_grid.
PathSample localized_break_objective(const BreakData& data, const BreakDesign& design,
                                     const std::vector<double>& s_grid);

// ---------------------------------------------------------------------------
// Boundary-constrained linear model: y_i = theta'x_i + eps_i maximized over
// Theta = {theta : g0 + G theta <= 0}, true value theta_n = theta0 + drift/sqrt(n).
// ---------------------------------------------------------------------------

struct BoundaryDesign {
  long long n = 2000;
  Eigen::MatrixXd G;   // g(theta) = g0 + G theta
  Eigen::VectorXd g0;
  Eigen::VectorXd theta0;  // g(theta0) <= 0
  Eigen::VectorXd drift;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(theta0.size()); }
  Eigen::VectorXd theta_n() const;
  // Limit of sqrt(n) g(theta_n): (G drift)_j where g_j(theta0) = 0, -inf otherwise.
  Eigen::VectorXd limit_b() const;
  PolyhedralSet limit_set() const;
  QuadraticLimit limit_objective() const;  // V = I, Z ~ N(0, sd^2 I)
  void validate() const;
};

struct BoundaryFit {
  Eigen::VectorXd theta_hat;
  Eigen::VectorXd h;  // sqrt(n)(theta_hat - theta_n)
};

BoundaryFit fit_boundary_model(const BoundaryDesign& design, std::uint64_t seed);
inline BoundaryFit fit_boundary_model(const BoundaryDesign& design) {
  return fit_boundary_model(design, design.seed);
}

// ---------------------------------------------------------------------------
// Weakly identified toy model: y_i = pi1 x1i + beta pi1 x2i + pi2 x3i + eps_i
// with constraints beta >= 0 and beta <= pi2.  beta is unidentified at pi1 = 0.
// ---------------------------------------------------------------------------

enum class WeakIdRegime { Weak, SemiStrong };

struct WeakIdDesign {
  long long n = 4000;
  WeakIdRegime regime = WeakIdRegime::Weak;
  double c = 1.0;      // pi1_n = c/sqrt(n) (weak) or c n^{-1/6} (semi-strong)
  double beta_n = 0.25;  // semi-strong designs sit on the bound: beta_n = pi2_0
  double pi2_0 = 0.5;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  int profile_grid = 2001;

  double pi1_n() const;
  double a_n() const;  // n^{1/3}
  void validate() const;
};

struct WeakIdFit {
  double beta_hat = 0.0;
  double pi1_hat = 0.0;
  double pi2_hat = 0.0;
  // Weak rescaling (beta_hat, sqrt(n)(pi_hat - pi_n)).
  double h_pi1 = 0.0;
  double h_pi2 = 0.0;
  // Semi-strong rescaling of the beta coordinate: a_n (beta_hat - beta_n).
  double h_beta_ss = 0.0;
};

WeakIdFit fit_weakid_model(const WeakIdDesign& design, std::uint64_t seed);
inline WeakIdFit fit_weakid_model(const WeakIdDesign& design) {
  return fit_weakid_model(design, design.seed);
}

// The constraint system of the toy model, for weakid_limit_sets:
// g(beta, pi) = (-beta, beta - pi2) <= 0.
struct WeakIdConstraints {
  Eigen::VectorXd b0;
  Eigen::MatrixXd A_beta;
  Eigen::MatrixXd A_pi;
};
WeakIdConstraints weakid_toy_constraints();

// Drift of the semi-strong rescaling, a_n g(beta_n, pi_n):
// (-inf, 0) when beta_n = pi2_0, componentwise limits otherwise.
Eigen::VectorXd weakid_toy_drift(const WeakIdDesign& design);

// Simulated draws from the limit argmax of the toy model.  For the weak
// regime the coordinates are (beta, h_pi1, h_pi2); for semi-strong
// (h_beta, h_pi1, h_pi2).  The limit objective is the Gaussian limit of the
// profiled least-squares objective, cross-checked in tests against
// brute-force finite-sample simulation.
struct WeakIdLimitDraws {
  std::vector<double> beta_coord;
  std::vector<double> h_pi1;
  std::vector<double> h_pi2;
};
WeakIdLimitDraws sample_weakid_limit(const WeakIdDesign& design, long long N,
                                     std::uint64_t seed, int threads = 1);

}  // namespace argmaxlab
