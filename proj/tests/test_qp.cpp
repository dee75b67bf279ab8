#include <doctest.h>

#include <argmaxlab/qp.hpp>
#include <argmaxlab/rng.hpp>

#include <Eigen/Dense>
#include <cmath>

using namespace argmaxlab;

namespace {

// Random strictly convex instance with the origin feasible (u >= 0).
struct Instance {
  Eigen::MatrixXd V, A;
  Eigen::VectorXd z, u;
};

Instance random_instance(Rng& rng, int d, int m) {
  Instance ins;
  Eigen::MatrixXd R(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) R(i, j) = rng.normal();
  ins.V = R * R.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
  ins.z = Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return 2.0 * rng.normal(); });
  ins.A.resize(m, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) ins.A(i, j) = rng.normal();
  ins.u = Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return 2.0 * rng.uniform(); });
  return ins;
}

double objective(const Instance& ins, const Eigen::VectorXd& h) {
  return ins.z.dot(h) - 0.5 * h.dot(ins.V * h);
}

// Grid search over [-5, 5]^d restricted to the polyhedron.
double brute_force_value(const Instance& ins, int pts_per_axis) {
  const int d = static_cast<int>(ins.V.rows());
  const double lo = -5.0, hi = 5.0;
  const double step = (hi - lo) / (pts_per_axis - 1);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd h(d);
  while (true) {
    for (int j = 0; j < d; ++j) h(j) = lo + idx[static_cast<std::size_t>(j)] * step;
    if (((ins.A * h - ins.u).array() <= 1e-12).all()) best = std::max(best, objective(ins, h));
    int j = 0;
    for (; j < d; ++j) {
      if (++idx[static_cast<std::size_t>(j)] < pts_per_axis) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
    if (j == d) break;
  }
  return best;
}

}  // namespace

TEST_CASE("unconstrained solution is V^-1 z") {
  // Oracle: no rows -> h = V^-1 z; V = diag(2, 4), z = (2, 2) -> h = (1, 0.5).
  Eigen::MatrixXd V = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  Eigen::VectorXd z(2); z << 2.0, 2.0;
  Eigen::MatrixXd A(0, 2);
  Eigen::VectorXd u(0);
  auto r = solve_qp(V, z, A, u, Eigen::VectorXd::Zero(2));
  CHECK(r.h(0) == doctest::Approx(1.0));
  CHECK(r.h(1) == doctest::Approx(0.5));
  CHECK(r.value == doctest::Approx(1.5));
  CHECK(r.kkt_residual <= 1e-10);
}

TEST_CASE("single active bound") {
  // Oracle: max zh - h^2/2 s.t. h <= 0 with z = 1: h* = 0, mu = 1.
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd z(1); z << 1.0;
  Eigen::MatrixXd A(1, 1); A << 1.0;
  Eigen::VectorXd u(1); u << 0.0;
  auto r = solve_qp(V, z, A, u, Eigen::VectorXd::Zero(1));
  CHECK(r.h(0) == doctest::Approx(0.0));
  CHECK(r.multipliers(0) == doctest::Approx(1.0));
  CHECK(r.value == doctest::Approx(0.0));
}

TEST_CASE("corner solution in 2d") {
  // Oracle: V = I, z = (2, 2), h1 <= 1, h2 <= 0.5 -> h* = (1, 0.5).
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd z(2); z << 2.0, 2.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd u(2); u << 1.0, 0.5;
  auto r = solve_qp(V, z, A, u, Eigen::VectorXd::Zero(2));
  CHECK(r.h(0) == doctest::Approx(1.0));
  CHECK(r.h(1) == doctest::Approx(0.5));
  CHECK(r.multipliers(0) == doctest::Approx(1.0));
  CHECK(r.multipliers(1) == doctest::Approx(1.5));
}

TEST_CASE("random instances agree with brute force and satisfy kkt") {
  Rng rng(7771);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.bits() % 3);
    const int m = 1 + static_cast<int>(rng.bits() % 4);
    Instance ins = random_instance(rng, d, m);
    auto r = solve_qp(ins.V, ins.z, ins.A, ins.u, Eigen::VectorXd::Zero(d));
    // Feasibility, sign, KKT certificates.
    CHECK(((ins.A * r.h - ins.u).array() <= 1e-9).all());
    CHECK((r.multipliers.array() >= -1e-12).all());
    CHECK(r.kkt_residual <= 1e-8);
    CHECK(r.comp_slackness <= 1e-8);
    CHECK(r.value == doctest::Approx(objective(ins, r.h)).epsilon(1e-9));
    // Never worse than the grid scan (up to quantization).
    const int ppa = d == 1 ? 4001 : (d == 2 ? 201 : 41);
    CHECK(r.value >= brute_force_value(ins, ppa) - 2e-3);
  }
}

TEST_CASE("solver is deterministic") {
  Rng rng(5);
  Instance ins = random_instance(rng, 3, 4);
  auto a = solve_qp(ins.V, ins.z, ins.A, ins.u, Eigen::VectorXd::Zero(3));
  auto b = solve_qp(ins.V, ins.z, ins.A, ins.u, Eigen::VectorXd::Zero(3));
  CHECK(a.h == b.h);
  CHECK(a.multipliers == b.multipliers);
}
