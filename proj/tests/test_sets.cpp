#include <doctest.h>

#include <argmaxlab/estimators.hpp>
#include <argmaxlab/rng.hpp>
#include <argmaxlab/sets.hpp>

#include <cmath>
#include <limits>

using namespace argmaxlab;

namespace {

Eigen::VectorXd v1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Box box1(double lo, double hi) {
  Box k;
  k.lo = v1(lo);
  k.hi = v1(hi);
  return k;
}

}  // namespace

TEST_CASE("gridset sorts and deduplicates") {
  GridSet g(1, {3.0, 1.0, 3.0, 2.0});
  CHECK(g.size() == 3);
  CHECK(g.point(0)(0) == doctest::Approx(1.0));
  CHECK(g.point(2)(0) == doctest::Approx(3.0));
  CHECK(GridSet::empty(2).is_empty());
}

TEST_CASE("point to gridset distance hand values") {
  // Oracle: Lambda_15 = {1/15, 14/15}; d(0, Lambda_15) = 1/15.
  GridSet g = GridSet::from_1d({1.0 / 15.0, 14.0 / 15.0});
  CHECK(point_to_set_distance(v1(0.0), g) == doctest::Approx(1.0 / 15.0));
  CHECK(point_to_set_distance(v1(1.0), g) == doctest::Approx(1.0 / 15.0));
  CHECK(point_to_set_distance(v1(0.5), g) == doctest::Approx(0.5 - 1.0 / 15.0));
  CHECK(std::isinf(point_to_set_distance(v1(0.0), GridSet::empty(1))));
}

TEST_CASE("point to polyhedral distance is the projection distance") {
  // {-1 + h <= 0} = {h <= 1}: d(3) = 2, d(0) = 0.
  PolyhedralSet p((Eigen::MatrixXd(1, 1) << 1.0).finished(), v1(-1.0));
  CHECK(point_to_set_distance(v1(3.0), p) == doctest::Approx(2.0));
  CHECK(point_to_set_distance(v1(0.0), p) == doctest::Approx(0.0));

  // {x + y <= 0} from (1, 1): distance sqrt(2).
  PolyhedralSet half((Eigen::MatrixXd(1, 2) << 1.0, 1.0).finished(),
                     Eigen::VectorXd::Zero(1));
  Eigen::VectorXd q(2);
  q << 1.0, 1.0;
  CHECK(point_to_set_distance(q, half) == doctest::Approx(std::sqrt(2.0)));
  Eigen::VectorXd proj = polyhedral_project(q, half);
  CHECK(proj(0) == doctest::Approx(0.0));
  CHECK(proj(1) == doctest::Approx(0.0));
}

TEST_CASE("directed distance conventions") {
  GridSet a = GridSet::from_1d({0.0, 1.0});
  GridSet b = GridSet::from_1d({0.0});
  CHECK(directed_distance(a, b) == doctest::Approx(1.0));
  CHECK(directed_distance(b, a) == doctest::Approx(0.0));
  CHECK(directed_distance(GridSet::empty(1), b) == 0.0);
  CHECK(std::isinf(directed_distance(a, GridSet::empty(1))));
}

TEST_CASE("pk estimate of a constant sequence recovers the set") {
  SetSequence seq([](long long) -> SetValue { return GridSet::from_1d({0.25, 0.75}); });
  auto est = pk_limit_estimate(seq, box1(0.0, 1.0), {10, 100, 1000}, 1e-3);
  CHECK(est.diagnostics.converged);
  for (double d : est.diagnostics.limit_to_seq) CHECK(d <= 2e-3);
  // Every estimated point sits within one membership radius of {0.25, 0.75}.
  GridSet truth = GridSet::from_1d({0.25, 0.75});
  CHECK(directed_distance(est.limit, truth) <= 2e-3);
  CHECK(directed_distance(truth, est.limit) <= 1e-3);
}

TEST_CASE("pk limit does not commute with intersection") {
  // Lambda_n = {1/n, 1 - 1/n} converges to {0, 1}, but intersecting with
  // F = [0, 1/2] u {1} first kills the upper accumulation point: the point 1
  // is approached only along points outside F (Remark 3).
  auto member_f = [](double x) { return x <= 0.5 || x == 1.0; };
  SetSequence plain([](long long n) -> SetValue {
    return GridSet::from_1d({1.0 / static_cast<double>(n),
                             1.0 - 1.0 / static_cast<double>(n)});
  });
  SetSequence intersected([&](long long n) -> SetValue {
    std::vector<double> pts;
    for (double x : {1.0 / static_cast<double>(n), 1.0 - 1.0 / static_cast<double>(n)})
      if (member_f(x)) pts.push_back(x);
    return GridSet::from_1d(std::move(pts));
  });
  const std::vector<long long> sched = {100, 1000, 6000, 10000};
  auto lim_plain = pk_limit_estimate(plain, box1(0.0, 1.0), sched, 1e-4);
  auto lim_inter = pk_limit_estimate(intersected, box1(0.0, 1.0), sched, 1e-4);
  CHECK(lim_plain.diagnostics.converged);
  CHECK(lim_inter.diagnostics.converged);
  // pk(Lambda_n) n F contains a point near 1 ...
  CHECK(point_to_set_distance(v1(1.0), lim_plain.limit) <= 1e-3);
  // ... while pk(Lambda_n n F) lives near 0 only.
  double max_pt = 0.0;
  for (std::size_t i = 0; i < lim_inter.limit.size(); ++i)
    max_pt = std::max(max_pt, lim_inter.limit.point(i)(0));
  CHECK(max_pt <= 1e-3);
  CHECK(point_to_set_distance(v1(0.0), lim_inter.limit) <= 1e-3);
}

TEST_CASE("rescaled break set enumerates the trimmed grid") {
  // T = 100, kappa = 1/4 -> vT^2 = 1/10 exactly; k in {15..85}, k0 = 50:
  // s-grid = {-3.5, -3.4, ..., 3.5}.
  const double vT = std::pow(100.0, -0.25);
  GridSet g = rescaled_break_set(100, 50, vT, 0.15, 0.85);
  REQUIRE(g.size() == 71);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(g.point(i)(0) == doctest::Approx(-3.5 + 0.1 * static_cast<double>(i)));
}

TEST_CASE("linearized boundary set matches direct constraint evaluation") {
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd b(3);
  b << -inf, 0.0, -1.0;
  Eigen::MatrixXd G(3, 2);
  G << 1.0, 0.0, 1.0, 1.0, 0.0, -1.0;
  PolyhedralSet p = linearized_boundary_set(b, G);
  CHECK(p.num_active() == 2);  // the -inf row never binds
  Rng rng(33);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(2);
    x << 4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5);
    const bool direct = (x(0) + x(1) <= kFeasTol) && (-1.0 - x(1) <= kFeasTol);
    CHECK(p.contains(x) == direct);
  }
}

TEST_CASE("mfcq examples") {
  // {h <= 0}: direction -1 strictly decreases the only active row.
  PolyhedralSet ok((Eigen::MatrixXd(1, 1) << 1.0).finished(), v1(0.0));
  auto r = mfcq_check(ok);
  CHECK(r.holds);
  CHECK(r.slack > 0.0);
  // {h <= 0, -h <= 0}: both rows active at 0; no direction decreases both.
  PolyhedralSet pinched((Eigen::MatrixXd(2, 1) << 1.0, -1.0).finished(),
                        Eigen::VectorXd::Zero(2));
  CHECK_FALSE(mfcq_check(pinched).holds);
}

TEST_CASE("weakid limit sets of the toy model") {
  WeakIdConstraints c = weakid_toy_constraints();
  Eigen::VectorXd pi0(2);
  pi0 << 0.0, 0.5;
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd drift(2);
  drift << -inf, 0.0;  // semi-strong design on the upper bound beta_n = pi2_0
  Eigen::MatrixXd g_beta(2, 1);
  g_beta << -1.0, 1.0;
  auto sets = weakid_limit_sets(c.b0, c.A_beta, c.A_pi, pi0, drift, g_beta);
  // B^W = [0, pi2_0] in the beta coordinate.
  CHECK(sets.b_weak.contains(v1(0.0)));
  CHECK(sets.b_weak.contains(v1(0.5)));
  CHECK_FALSE(sets.b_weak.contains(v1(0.51)));
  CHECK_FALSE(sets.b_weak.contains(v1(-0.01)));
  // B^SS = {lambda <= 0}: the lower bound drifts to -inf, the upper is active.
  CHECK(sets.b_semistrong.contains(v1(-100.0)));
  CHECK(sets.b_semistrong.contains(v1(0.0)));
  CHECK_FALSE(sets.b_semistrong.contains(v1(0.01)));
  CHECK(sets.mfcq_ok);
  CHECK(sets.product_with_pi_space);
}
