#include "argmaxlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "argmaxlab/parallel.hpp"
#include "argmaxlab/qp.hpp"

namespace argmaxlab {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

long long floor_ll(double x) { return static_cast<long long>(std::floor(x + 1e-9)); }

// Golden-section maximization of f over [lo, hi] to interval width tol.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

}  // namespace

// ---------------------------------------------------------------------------
// Break-date estimation
// ---------------------------------------------------------------------------

double BreakDesign::vT() const { return std::pow(static_cast<double>(T), -kappa); }

long long BreakDesign::trim_lo() const { return floor_ll(lambda1 * static_cast<double>(T)); }
long long BreakDesign::trim_hi() const { return floor_ll(lambda2 * static_cast<double>(T)); }

long long BreakDesign::k0() const {
  if (regime == BreakRegime::Interior) return floor_ll(tau * static_cast<double>(T));
  const double v2inv = 1.0 / (vT() * vT());
  return floor_ll(lambda2 * static_cast<double>(T) - a * v2inv);
}

void BreakDesign::validate() const {
  if (T < 10) throw std::invalid_argument("BreakDesign: T too small");
  if (beta.size() == 0 || delta0.size() != beta.size()) {
    throw std::invalid_argument("BreakDesign: beta/delta0 dimension mismatch");
  }
  if (delta0.norm() == 0.0) throw std::invalid_argument("BreakDesign: delta0 must be nonzero");
  if (!(kappa > 0.0 && kappa < 0.5)) {
    throw std::invalid_argument("BreakDesign: kappa must lie in (0, 1/2)");
  }
  if (!(lambda1 > 0.0 && lambda1 < lambda2 && lambda2 < 1.0)) {
    throw std::invalid_argument("BreakDesign: need 0 < lambda1 < lambda2 < 1");
  }
  if (regime == BreakRegime::Interior && !(tau > lambda1 && tau < lambda2)) {
    throw std::invalid_argument("BreakDesign: tau must lie in (lambda1, lambda2)");
  }
  const long long k = k0();
  if (k < p() + 1 || k > T - p() - 1) {
    throw std::invalid_argument("BreakDesign: k0 outside {p+1, ..., T-p-1}");
  }
  if (!(noise_sd > 0.0)) throw std::invalid_argument("BreakDesign: noise_sd must be positive");
}

GaussianSpec BreakDesign::limit_spec() const {
  const int d = p();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const double s2 = noise_sd * noise_sd;
  return GaussianSpec(s2 * I, s2 * I, I, I, delta0);
}

BreakData simulate_break_data(const BreakDesign& design, std::uint64_t seed) {
  design.validate();
  const long long T = design.T;
  const int p = design.p();
  const long long k0 = design.k0();
  const Eigen::VectorXd delta_T = design.delta0 * design.vT();
  Rng rng(seed);
  BreakData data;
  data.x.resize(T, p);
  data.y.resize(T);
  for (long long t = 0; t < T; ++t) {
    for (int j = 0; j < p; ++j) data.x(t, j) = rng.normal();
    const double eps = design.noise_sd * rng.normal();
    const bool post = (t + 1) > k0;  // observations are 1-based in the model
    data.y(t) = data.x.row(t).dot(design.beta + (post ? delta_T : Eigen::VectorXd::Zero(p))) + eps;
  }
  return data;
}

BreakData simulate_break_data(const BreakDesign& design) {
  return simulate_break_data(design, design.seed);
}

BreakObjective::BreakObjective(const BreakData& data)
    : T_(data.y.size()), p_(static_cast<int>(data.x.cols())) {
  cum_xx_.resize(static_cast<std::size_t>(T_) + 1);
  cum_xy_.resize(static_cast<std::size_t>(T_) + 1);
  cum_xx_[0] = Eigen::MatrixXd::Zero(p_, p_);
  cum_xy_[0] = Eigen::VectorXd::Zero(p_);
  yy_ = 0.0;
  for (long long t = 0; t < T_; ++t) {
    const auto xt = data.x.row(t).transpose();
    cum_xx_[static_cast<std::size_t>(t) + 1] = cum_xx_[static_cast<std::size_t>(t)] + xt * xt.transpose();
    cum_xy_[static_cast<std::size_t>(t) + 1] = cum_xy_[static_cast<std::size_t>(t)] + xt * data.y(t);
    yy_ += data.y(t) * data.y(t);
  }
  st_ldlt_.compute(cum_xx_.back());
  if (st_ldlt_.info() != Eigen::Success) {
    throw std::runtime_error("BreakObjective: X'X is singular");
  }
  st_inv_rt_ = st_ldlt_.solve(cum_xy_.back());
  ssr0_ = yy_ - cum_xy_.back().dot(st_inv_rt_);
}

double BreakObjective::v_t(long long k) const {
  if (k < p_ || k > T_ - p_) {
    std::ostringstream os;
    os << "V_T: k = " << k << " outside {p, ..., T-p}";
    throw std::invalid_argument(os.str());
  }
  const Eigen::MatrixXd A = cum_xx_.back() - cum_xx_[static_cast<std::size_t>(k)];
  const Eigen::VectorXd c = cum_xy_.back() - cum_xy_[static_cast<std::size_t>(k)];
  const Eigen::VectorXd zmy = c - A * st_inv_rt_;
  const Eigen::MatrixXd zmz = A - A * st_ldlt_.solve(A);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(zmz);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    std::ostringstream os;
    os << "V_T: singular partial design matrix at k = " << k;
    throw std::runtime_error(os.str());
  }
  return std::max(0.0, zmy.dot(ldlt.solve(zmy)));
}

double BreakObjective::ssr_direct(long long k) const {
  const Eigen::MatrixXd& st = cum_xx_.back();
  const Eigen::MatrixXd A = st - cum_xx_[static_cast<std::size_t>(k)];
  const Eigen::VectorXd c = cum_xy_.back() - cum_xy_[static_cast<std::size_t>(k)];
  Eigen::MatrixXd W(2 * p_, 2 * p_);
  W.topLeftCorner(p_, p_) = st;
  W.topRightCorner(p_, p_) = A;
  W.bottomLeftCorner(p_, p_) = A;
  W.bottomRightCorner(p_, p_) = A;
  Eigen::VectorXd rhs(2 * p_);
  rhs.head(p_) = cum_xy_.back();
  rhs.tail(p_) = c;
  Eigen::VectorXd coef = W.ldlt().solve(rhs);
  return yy_ - coef.dot(rhs);
}

double v_t_objective(long long k, const BreakObjective& obj) { return obj.v_t(k); }

BreakFitResult estimate_break(const BreakData& data, const BreakDesign& design) {
  design.validate();
  BreakObjective obj(data);
  BreakFitResult fit;
  double vmax = -kInf;
  for (long long k = design.trim_lo(); k <= design.trim_hi(); ++k) {
    fit.k_grid.push_back(k);
    const double v = obj.v_t(k);
    fit.v_profile.push_back(v);
    vmax = std::max(vmax, v);
  }
  if (fit.k_grid.empty()) throw std::runtime_error("estimate_break: empty trimming set");
  int hits = 0;
  for (std::size_t i = 0; i < fit.k_grid.size(); ++i) {
    if (fit.v_profile[i] >= vmax - kTieTol) {
      if (hits == 0) fit.k_hat = fit.k_grid[i];
      ++hits;
    }
  }
  fit.tie = hits > 1;
  const double v2 = design.vT() * design.vT();
  fit.s_hat = v2 * static_cast<double>(fit.k_hat - design.k0());
  return fit;
}

PathSample localized_break_objective(const BreakData& data, const BreakDesign& design,
                                     const std::vector<double>& s_grid) {
  design.validate();
  for (std::size_t i = 1; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > s_grid[i - 1])) {
      throw std::invalid_argument("localized_break_objective: s_grid must be strictly increasing");
    }
  }
  BreakObjective obj(data);
  const long long k0 = design.k0();
  const double v2inv = 1.0 / (design.vT() * design.vT());
  std::vector<long long> ks(s_grid.size());
  std::vector<double> clipped;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const long long k = floor_ll(static_cast<double>(k0) + s_grid[i] * v2inv);
    if (k < design.p() || k > design.T - design.p()) {
      clipped.push_back(s_grid[i]);
    }
    ks[i] = k;
  }
  if (!clipped.empty()) {
    std::ostringstream os;
    os << "localized_break_objective: s values leave the valid k range:";
    for (double s : clipped) os << ' ' << s;
    throw std::invalid_argument(os.str());
  }
  const double v0 = obj.v_t(k0);
  PathSample path;
  path.grid = s_grid;
  path.process_id = "M_T";
  path.seed = design.seed;
  path.values.resize(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    path.values[i] = (ks[i] == k0) ? 0.0 : obj.v_t(ks[i]) - v0;
  }
  return path;
}

// ---------------------------------------------------------------------------
// Boundary-constrained linear model
// ---------------------------------------------------------------------------

Eigen::VectorXd BoundaryDesign::theta_n() const {
  return theta0 + drift / std::sqrt(static_cast<double>(n));
}

void BoundaryDesign::validate() const {
  if (G.rows() != g0.size() || G.cols() != theta0.size() || drift.size() != theta0.size()) {
    throw std::invalid_argument("BoundaryDesign: dimension mismatch");
  }
  if (n < 10) throw std::invalid_argument("BoundaryDesign: n too small");
  if (((g0 + G * theta0).array() > kFeasTol).any()) {
    throw std::invalid_argument("BoundaryDesign: theta0 violates the constraints");
  }
  if (((g0 + G * theta_n()).array() > kFeasTol).any()) {
    throw std::invalid_argument("BoundaryDesign: theta_n leaves the parameter space");
  }
}

Eigen::VectorXd BoundaryDesign::limit_b() const {
  const Eigen::VectorXd g_at_0 = g0 + G * theta0;
  Eigen::VectorXd b(g_at_0.size());
  const Eigen::VectorXd gd = G * drift;
  for (int j = 0; j < b.size(); ++j) {
    b(j) = (std::fabs(g_at_0(j)) <= 1e-12) ? gd(j) : -kInf;
  }
  return b;
}

PolyhedralSet BoundaryDesign::limit_set() const { return linearized_boundary_set(limit_b(), G); }

QuadraticLimit BoundaryDesign::limit_objective() const {
  const int d = dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  return QuadraticLimit(I, noise_sd * noise_sd * I, Eigen::VectorXd::Zero(d));
}

BoundaryFit fit_boundary_model(const BoundaryDesign& design, std::uint64_t seed) {
  design.validate();
  const int d = design.dim();
  const long long n = design.n;
  const double rootn = std::sqrt(static_cast<double>(n));
  const Eigen::VectorXd tn = design.theta_n();
  Rng rng(seed);
  Eigen::MatrixXd sxx = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd sxe = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd x(d);
  for (long long i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(j) = rng.normal();
    const double eps = design.noise_sd * rng.normal();
    sxx.noalias() += x * x.transpose();
    sxe.noalias() += x * eps;
  }
  // Exact localized objective: h'(n^{-1/2} sum x e) - h'(n^{-1} sum xx')h / 2
  // maximized over sqrt(n) g(theta_n) + G h <= 0.
  const Eigen::MatrixXd vhat = sxx / static_cast<double>(n);
  const Eigen::VectorXd zhat = sxe / rootn;
  const Eigen::VectorXd u = -rootn * (design.g0 + design.G * tn);
  QpResult r = solve_qp(vhat, zhat, design.G, u, Eigen::VectorXd::Zero(d));
  BoundaryFit fit;
  fit.h = r.h;
  fit.theta_hat = tn + r.h / rootn;
  return fit;
}

// ---------------------------------------------------------------------------
// Weakly identified toy model
// ---------------------------------------------------------------------------

double WeakIdDesign::pi1_n() const {
  const double nn = static_cast<double>(n);
  return regime == WeakIdRegime::Weak ? c / std::sqrt(nn) : c * std::pow(nn, -1.0 / 6.0);
}

double WeakIdDesign::a_n() const { return std::cbrt(static_cast<double>(n)); }

void WeakIdDesign::validate() const {
  if (n < 10) throw std::invalid_argument("WeakIdDesign: n too small");
  if (!(c > 0.0)) throw std::invalid_argument("WeakIdDesign: c must be positive");
  if (!(beta_n >= 0.0 && beta_n <= pi2_0)) {
    throw std::invalid_argument("WeakIdDesign: beta_n must lie in [0, pi2_0]");
  }
  if (profile_grid < 3) throw std::invalid_argument("WeakIdDesign: profile grid too small");
  if (!(noise_sd > 0.0)) throw std::invalid_argument("WeakIdDesign: noise_sd must be positive");
}

namespace {

// Sufficient statistics of the toy regression.
struct WeakIdStats {
  Eigen::Matrix3d S;  // cross-products of (x1, x2, x3)
  Eigen::Vector3d r;  // x'y
  double yy;
};

WeakIdStats weakid_stats(const WeakIdDesign& d, std::uint64_t seed) {
  Rng rng(seed);
  WeakIdStats st;
  st.S.setZero();
  st.r.setZero();
  st.yy = 0.0;
  const double p1 = d.pi1_n();
  for (long long i = 0; i < d.n; ++i) {
    Eigen::Vector3d x;
    x << rng.normal(), rng.normal(), rng.normal();
    const double eps = d.noise_sd * rng.normal();
    const double y = p1 * x(0) + d.beta_n * p1 * x(1) + d.pi2_0 * x(2) + eps;
    st.S.noalias() += x * x.transpose();
    st.r.noalias() += x * y;
    st.yy += y * y;
  }
  return st;
}

// Profiled pi = (pi1, pi2) at a fixed beta, honoring pi2 >= beta.
struct ProfilePoint {
  double pi1, pi2, ssr;
};

ProfilePoint profile_at(const WeakIdStats& st, double beta) {
  const double ww = st.S(0, 0) + 2.0 * beta * st.S(0, 1) + beta * beta * st.S(1, 1);
  const double wx3 = st.S(0, 2) + beta * st.S(1, 2);
  const double wy = st.r(0) + beta * st.r(1);
  const double x3x3 = st.S(2, 2);
  const double x3y = st.r(2);
  auto ssr_of = [&](double p1, double p2) {
    return st.yy - 2.0 * (p1 * wy + p2 * x3y) + p1 * p1 * ww + 2.0 * p1 * p2 * wx3 +
           p2 * p2 * x3x3;
  };
  const double det = ww * x3x3 - wx3 * wx3;
  ProfilePoint best{0.0, beta, kInf};
  if (det > 1e-12 * std::max(1.0, ww * x3x3)) {
    const double p1u = (wy * x3x3 - wx3 * x3y) / det;
    const double p2u = (ww * x3y - wx3 * wy) / det;
    if (p2u >= beta - 1e-12) {
      best = {p1u, p2u, ssr_of(p1u, p2u)};
      return best;
    }
  }
  // Constraint pi2 >= beta is active.
  const double p1 = ww > 0.0 ? (wy - beta * wx3) / ww : 0.0;
  best = {p1, beta, ssr_of(p1, beta)};
  return best;
}

}  // namespace

WeakIdFit fit_weakid_model(const WeakIdDesign& design, std::uint64_t seed) {
  design.validate();
  const WeakIdStats st = weakid_stats(design, seed);

  // Feasible beta range for the profile grid.
  const ProfilePoint at0 = profile_at(st, 0.0);
  const double cap = std::max(2.0, 2.0 * std::fabs(at0.pi2) + 1.0);
  const int m = design.profile_grid;
  const double step = cap / static_cast<double>(m - 1);
  std::vector<double> vals(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    vals[static_cast<std::size_t>(i)] = -profile_at(st, step * static_cast<double>(i)).ssr;
  }
  int grid_arg = 0;
  for (int i = 1; i < m; ++i) {
    if (vals[static_cast<std::size_t>(i)] > vals[static_cast<std::size_t>(grid_arg)]) grid_arg = i;
  }
  auto value_at = [&](double beta) { return -profile_at(st, beta).ssr; };

  // Refine every interior local maximum of the grid profile; the objective
  // can be non-quadratic in beta.
  double best_beta = 0.0, best_val = -kInf;
  double argmax_bracket_val = -kInf;
  int best_bracket = -1;
  for (int i = 0; i < m; ++i) {
    const bool left_ok = i == 0 || vals[static_cast<std::size_t>(i)] >= vals[static_cast<std::size_t>(i - 1)];
    const bool right_ok = i == m - 1 || vals[static_cast<std::size_t>(i)] >= vals[static_cast<std::size_t>(i + 1)];
    if (!(left_ok && right_ok)) continue;
    const double lo = std::max(0.0, step * static_cast<double>(i - 1));
    const double hi = std::min(cap, step * static_cast<double>(i + 1));
    const double b = golden_max(value_at, lo, hi, 1e-10);
    const double v = value_at(b);
    if (v > best_val) {
      best_val = v;
      best_beta = b;
      best_bracket = i;
    }
    if (std::abs(i - grid_arg) <= 1) argmax_bracket_val = std::max(argmax_bracket_val, v);
  }
  if (best_bracket >= 0 && std::abs(best_bracket - grid_arg) > 1 &&
      best_val > argmax_bracket_val + 1e-6) {
    throw std::runtime_error(
        "fit_weakid_model: profile grid too coarse (refinement moved to a "
        "non-adjacent beta); increase profile_grid");
  }

  if (best_beta <= 1e-8) best_beta = 0.0;  // snap the boundary atom exactly
  const ProfilePoint opt = profile_at(st, best_beta);
  const double rootn = std::sqrt(static_cast<double>(design.n));
  WeakIdFit fit;
  fit.beta_hat = best_beta;
  fit.pi1_hat = opt.pi1;
  fit.pi2_hat = opt.pi2;
  fit.h_pi1 = rootn * (opt.pi1 - design.pi1_n());
  fit.h_pi2 = rootn * (opt.pi2 - design.pi2_0);
  fit.h_beta_ss = design.a_n() * (best_beta - design.beta_n);
  return fit;
}

WeakIdConstraints weakid_toy_constraints() {
  WeakIdConstraints c;
  c.b0 = Eigen::VectorXd::Zero(2);
  c.A_beta.resize(2, 1);
  c.A_beta << -1.0, 1.0;
  c.A_pi.resize(2, 2);
  c.A_pi << 0.0, 0.0, 0.0, -1.0;
  return c;
}

Eigen::VectorXd weakid_toy_drift(const WeakIdDesign& design) {
  Eigen::VectorXd b(2);
  b(0) = design.beta_n > 0.0 ? -kInf : 0.0;
  b(1) = std::fabs(design.beta_n - design.pi2_0) <= 1e-12 ? 0.0 : -kInf;
  return b;
}

WeakIdLimitDraws sample_weakid_limit(const WeakIdDesign& design, long long N,
                                     std::uint64_t seed, int threads) {
  design.validate();
  if (N < 1) throw std::invalid_argument("sample_weakid_limit: N must be >= 1");
  WeakIdLimitDraws out;
  out.beta_coord.resize(static_cast<std::size_t>(N));
  out.h_pi1.resize(static_cast<std::size_t>(N));
  out.h_pi2.resize(static_cast<std::size_t>(N));
  const double sd = design.noise_sd;

  const double rootn = std::sqrt(static_cast<double>(design.n));

  if (design.regime == WeakIdRegime::Weak) {
    // Gaussian limit of the profiled objective: with t(beta, h) =
    // (h1, c(beta - beta_n) + beta h1, h2), maximize t'Z - |t|^2/2 over the
    // exact rescaled constraint set 0 <= beta <= pi2_0 + h2/sqrt(n), free h.
    // (Its PK limit is B^W x R^{d_pi}; keeping the n-exact coupling gives the
    // boundary atom of beta the same O(n^-1/2) smear as the estimator.)
    const double c = design.c;
    const double bn = design.beta_n;
    const double p20 = design.pi2_0;
    parallel_for(N, threads, [&](long long i) {
      Rng rng(derive_rep_seed(seed, static_cast<std::uint64_t>(i)));
      const double z1 = sd * rng.normal();
      const double z2 = sd * rng.normal();
      const double z3 = sd * rng.normal();
      auto h2_at = [&](double beta) { return std::max(z3, rootn * (beta - p20)); };
      auto prof = [&](double beta) {
        const double k = c * (beta - bn);
        const double h1 = (z1 + beta * z2 - beta * k) / (1.0 + beta * beta);
        const double t2 = beta * h1 + k;
        const double h2 = h2_at(beta);
        return h1 * z1 + t2 * z2 + h2 * z3 - 0.5 * (h1 * h1 + t2 * t2 + h2 * h2);
      };
      const int m = 201;
      const double hi = p20 + 6.0 * sd / rootn;
      const double step = hi / static_cast<double>(m - 1);
      int arg = 0;
      double vmax = prof(0.0);
      for (int j = 1; j < m; ++j) {
        const double v = prof(step * static_cast<double>(j));
        if (v > vmax) {
          vmax = v;
          arg = j;
        }
      }
      const double lo_b = std::max(0.0, step * static_cast<double>(arg - 1));
      const double hi_b = std::min(hi, step * static_cast<double>(arg + 1));
      double beta = golden_max(prof, lo_b, hi_b, 1e-12);
      if (beta <= 1e-8) beta = 0.0;  // snap the boundary atom exactly
      const double k = c * (beta - bn);
      const double h1 = (z1 + beta * z2 - beta * k) / (1.0 + beta * beta);
      out.beta_coord[static_cast<std::size_t>(i)] = beta;
      out.h_pi1[static_cast<std::size_t>(i)] = h1;
      out.h_pi2[static_cast<std::size_t>(i)] = h2_at(beta);
    });
    return out;
  }

  // Semi-strong: t = A u with u = (h1, h_beta, h2); quadratic in u over the
  // exact rescaled set
  //   -h_beta <= a_n beta_n,   h_beta - (a_n/sqrt(n)) h2 <= a_n(pi2_0 - beta_n),
  // whose PK limit is B^SS x R^{d_pi}.
  Eigen::Matrix3d A;
  A << 1.0, 0.0, 0.0, design.beta_n, design.c, 0.0, 0.0, 0.0, 1.0;
  const Eigen::Matrix3d V = A.transpose() * A;
  const double an = design.a_n();
  Eigen::MatrixXd cons(2, 3);
  cons << 0.0, -1.0, 0.0, 0.0, 1.0, -an / rootn;
  Eigen::VectorXd u_rhs(2);
  u_rhs << an * design.beta_n, an * (design.pi2_0 - design.beta_n);
  parallel_for(N, threads, [&](long long i) {
    Rng rng(derive_rep_seed(seed, static_cast<std::uint64_t>(i)));
    Eigen::Vector3d z;
    z << sd * rng.normal(), sd * rng.normal(), sd * rng.normal();
    QpResult r = solve_qp(V, A.transpose() * z, cons, u_rhs, Eigen::VectorXd::Zero(3));
    out.h_pi1[static_cast<std::size_t>(i)] = r.h(0);
    out.beta_coord[static_cast<std::size_t>(i)] = r.h(1);
    out.h_pi2[static_cast<std::size_t>(i)] = r.h(2);
  });
  return out;
}

}  // namespace argmaxlab
