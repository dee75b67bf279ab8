#include "argmaxlab/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace argmaxlab {

namespace {
constexpr double kStepTol = 1e-12;
constexpr double kMultTol = 1e-10;
constexpr double kFeasTol = 1e-9;
}  // namespace

QpResult solve_qp(const Eigen::MatrixXd& V, const Eigen::VectorXd& z,
                  const Eigen::MatrixXd& A, const Eigen::VectorXd& u,
                  const Eigen::VectorXd& h0, int max_iter) {
  const int d = static_cast<int>(V.rows());
  const int m = static_cast<int>(A.rows());
  if (V.cols() != d || z.size() != d || (m > 0 && A.cols() != d) || u.size() != m ||
      h0.size() != d) {
    throw std::invalid_argument("solve_qp: inconsistent dimensions");
  }
  if (m > 0 && ((A * h0 - u).array() > kFeasTol).any()) {
    throw std::runtime_error("solve_qp: starting point is infeasible");
  }
  if (max_iter <= 0) max_iter = 10 * std::max(1, m) * std::max(1, d) + 20;

  Eigen::VectorXd h = h0;
  std::vector<int> working;
  Eigen::VectorXd slack = u - A * h;
  for (int j = 0; j < m; ++j) {
    if (slack(j) <= kFeasTol) working.push_back(j);
  }

  const double scale = std::max(1.0, z.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);

  int iter = 0;
  for (;; ++iter) {
    if (iter > max_iter) {
      std::ostringstream os;
      os << "solve_qp: iteration cap " << max_iter << " exceeded (d=" << d
         << ", m=" << m << ", working set size=" << working.size() << ")";
      throw std::runtime_error(os.str());
    }

    const int w = static_cast<int>(working.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(d + w, d + w);
    kkt.topLeftCorner(d, d) = V;
    for (int i = 0; i < w; ++i) {
      kkt.block(0, d + i, d, 1) = A.row(working[i]).transpose();
      kkt.block(d + i, 0, 1, d) = A.row(working[i]);
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + w);
    rhs.head(d) = z - V * h;
    Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd p = sol.head(d);
    Eigen::VectorXd lam = sol.tail(w);

    if (p.lpNorm<Eigen::Infinity>() <= kStepTol * scale) {
      // Stationary on the working set; check multiplier signs.
      int drop = -1;
      for (int i = 0; i < w; ++i) {
        if (lam(i) < -kMultTol) { drop = i; break; }  // lowest index first
      }
      if (drop < 0) {
        mu.setZero();
        for (int i = 0; i < w; ++i) mu(working[i]) = std::max(0.0, lam(i));
        QpResult res;
        res.h = h;
        res.multipliers = mu;
        res.value = z.dot(h) - 0.5 * h.dot(V * h);
        res.kkt_residual = (z - V * h - A.transpose() * mu).lpNorm<Eigen::Infinity>();
        double cs = 0.0;
        if (m > 0) {
          Eigen::VectorXd g = A * h - u;
          for (int j = 0; j < m; ++j) cs = std::max(cs, std::fabs(mu(j) * g(j)));
        }
        res.comp_slackness = cs;
        res.iterations = iter;
        return res;
      }
      working.erase(working.begin() + drop);
      continue;
    }

    // Step length to the nearest blocking constraint.
    double alpha = 1.0;
    int block = -1;
    for (int j = 0; j < m; ++j) {
      if (std::find(working.begin(), working.end(), j) != working.end()) continue;
      const double ap = A.row(j).dot(p);
      if (ap > kStepTol) {
        const double a = (u(j) - A.row(j).dot(h)) / ap;
        if (a < alpha - 1e-14) {
          alpha = std::max(0.0, a);
          block = j;
        }
      }
    }
    h += alpha * p;
    if (block >= 0) working.push_back(block);
    std::sort(working.begin(), working.end());
  }
}

}  // namespace argmaxlab
