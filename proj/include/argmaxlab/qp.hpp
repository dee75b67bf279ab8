#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace argmaxlab {

// Solution of  max_h  z'h - (1/2) h'Vh  subject to  A h <= u.
struct QpResult {
  Eigen::VectorXd h;
  Eigen::VectorXd multipliers;   // one per inequality row, >= 0
  double value = 0.0;
  double kkt_residual = 0.0;     // ||z - V h - A' mu||_inf
  double comp_slackness = 0.0;   // max_j |mu_j (A h - u)_j|
  int iterations = 0;
};

// Primal active-set method for a strictly convex QP over a polyhedron.
// Requires a feasible starting point h0.  Constraint selection is
// deterministic: the lowest-index violated/blocking row is chosen first,
// ties in multipliers drop the lowest index.  Throws std::runtime_error if
// the iteration cap is exceeded.
QpResult solve_qp(const Eigen::MatrixXd& V, const Eigen::VectorXd& z,
                  const Eigen::MatrixXd& A, const Eigen::VectorXd& u,
                  const Eigen::VectorXd& h0, int max_iter = 0);

}  // namespace argmaxlab
