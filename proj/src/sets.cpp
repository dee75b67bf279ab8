#include "argmaxlab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "argmaxlab/kernels.hpp"
#include "argmaxlab/qp.hpp"

namespace argmaxlab {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Canonical rounding to 12 significant digits; keeps set identities stable
// across platforms.
double round12(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? 0.0 : x;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  return std::strtod(buf, nullptr);
}

void check_dim(int a, int b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

GridSet::GridSet(int dim, std::vector<double> flat_points) : dim_(dim) {
  if (dim <= 0) throw std::invalid_argument("GridSet: dim must be positive");
  if (flat_points.size() % static_cast<std::size_t>(dim) != 0) {
    throw std::invalid_argument("GridSet: point data not a multiple of dim");
  }
  for (double& v : flat_points) {
    if (std::isnan(v)) throw std::invalid_argument("GridSet: NaN coordinate");
    v = round12(v);
  }
  const std::size_t d = static_cast<std::size_t>(dim);
  const std::size_t n = flat_points.size() / d;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto lex_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(
        flat_points.begin() + a * d, flat_points.begin() + (a + 1) * d,
        flat_points.begin() + b * d, flat_points.begin() + (b + 1) * d);
  };
  std::sort(order.begin(), order.end(), lex_less);
  pts_.reserve(flat_points.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = flat_points.data() + order[i] * d;
    if (!pts_.empty() &&
        std::equal(p, p + d, pts_.end() - static_cast<long>(d), pts_.end())) {
      continue;  // exact duplicate
    }
    pts_.insert(pts_.end(), p, p + d);
  }
}

PolyhedralSet::PolyhedralSet(Eigen::MatrixXd G, Eigen::VectorXd b)
    : G_(std::move(G)), b_(std::move(b)) {
  if (G_.rows() != b_.size()) {
    throw std::invalid_argument("PolyhedralSet: G rows must match length of b");
  }
  active_.resize(static_cast<std::size_t>(b_.size()));
  for (int j = 0; j < b_.size(); ++j) {
    const double bj = b_(j);
    if (std::isnan(bj)) throw std::invalid_argument("PolyhedralSet: NaN in b");
    if (bj > kFeasTol) {
      throw std::invalid_argument("PolyhedralSet: b entries must lie in [-inf, 0]");
    }
    active_[static_cast<std::size_t>(j)] = std::isfinite(bj);
  }
}

int PolyhedralSet::num_active() const {
  return static_cast<int>(std::count(active_.begin(), active_.end(), true));
}

Eigen::MatrixXd PolyhedralSet::active_G() const {
  Eigen::MatrixXd A(num_active(), dim());
  int r = 0;
  for (int j = 0; j < num_rows(); ++j) {
    if (active_[static_cast<std::size_t>(j)]) A.row(r++) = G_.row(j);
  }
  return A;
}

Eigen::VectorXd PolyhedralSet::active_b() const {
  Eigen::VectorXd v(num_active());
  int r = 0;
  for (int j = 0; j < num_rows(); ++j) {
    if (active_[static_cast<std::size_t>(j)]) v(r++) = b_(j);
  }
  return v;
}

bool PolyhedralSet::contains(const Eigen::VectorXd& x, double tol) const {
  check_dim(static_cast<int>(x.size()), dim(), "PolyhedralSet::contains");
  for (int j = 0; j < num_rows(); ++j) {
    if (!active_[static_cast<std::size_t>(j)]) continue;
    if (b_(j) + G_.row(j).dot(x) > tol) return false;
  }
  return true;
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  for (int k = 0; k < dim(); ++k) {
    if (x(k) < lo(k) - tol || x(k) > hi(k) + tol) return false;
  }
  return true;
}

SetSequence::SetSequence(Family family, std::string description)
    : family_(std::move(family)), description_(std::move(description)) {}

SetSequence::SetSequence(Family family, CenterRule center, ScaleRule scale,
                         std::string description)
    : family_(std::move(family)),
      center_(std::move(center)),
      scale_(std::move(scale)),
      description_(std::move(description)) {}

SetValue SetSequence::at(long long n) const {
  SetValue raw_set = family_(n);
  if (!center_ && !scale_) return raw_set;
  const int d = set_dim(raw_set);
  Eigen::VectorXd c = center_ ? center_(n) : Eigen::VectorXd::Zero(d);
  const double s = scale_ ? scale_(n) : 1.0;
  if (!(s > 0.0)) throw std::invalid_argument("SetSequence: scale must be positive");
  if (std::holds_alternative<GridSet>(raw_set)) {
    const GridSet& g = std::get<GridSet>(raw_set);
    std::vector<double> flat;
    flat.reserve(g.data().size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      Eigen::VectorXd y = s * (g.point(i) - c);
      flat.insert(flat.end(), y.data(), y.data() + d);
    }
    return GridSet(d, std::move(flat));
  }
  // y = s (x - c)  maps  {x : b + G x <= 0}  to  {y : (b + G c) + (G / s) y <= 0}.
  const PolyhedralSet& p = std::get<PolyhedralSet>(raw_set);
  Eigen::VectorXd b2 = p.b();
  for (int j = 0; j < p.num_rows(); ++j) {
    if (p.row_active(j)) b2(j) += p.G().row(j).dot(c);
  }
  return PolyhedralSet(p.G() / s, b2);
}

int set_dim(const SetValue& s) {
  return std::visit([](const auto& v) { return v.dim(); }, s);
}

bool set_is_empty(const SetValue& s) {
  if (std::holds_alternative<GridSet>(s)) return std::get<GridSet>(s).is_empty();
  return false;  // polyhedral sets here always contain the origin (b <= 0)
}

double point_to_set_distance(const Eigen::VectorXd& h, const GridSet& s) {
  check_dim(static_cast<int>(h.size()), s.dim(), "point_to_set_distance");
  if (s.is_empty()) return kInf;
  if (s.dim() == 1) {
    // Lexicographic order is ascending order in 1-D.
    const auto& xs = s.data();
    auto it = std::lower_bound(xs.begin(), xs.end(), h(0));
    double best = kInf;
    if (it != xs.end()) best = std::min(best, *it - h(0));
    if (it != xs.begin()) best = std::min(best, h(0) - *(it - 1));
    return best;
  }
  const double d2 = kernels::min_sqdist(s.data().data(), s.size(),
                                        static_cast<std::size_t>(s.dim()), h.data());
  return std::sqrt(d2);
}

Eigen::VectorXd polyhedral_project(const Eigen::VectorXd& h, const PolyhedralSet& s) {
  check_dim(static_cast<int>(h.size()), s.dim(), "polyhedral_project");
  if (s.num_active() == 0 || s.contains(h)) return h;
  // argmin ||x - h||^2  ==  argmax h'x - x'x/2.
  const Eigen::MatrixXd V = Eigen::MatrixXd::Identity(s.dim(), s.dim());
  QpResult r = solve_qp(V, h, s.active_G(), -s.active_b(),
                        Eigen::VectorXd::Zero(s.dim()));
  return r.h;
}

double point_to_set_distance(const Eigen::VectorXd& h, const PolyhedralSet& s) {
  return (polyhedral_project(h, s) - h).norm();
}

double point_to_set_distance(const Eigen::VectorXd& h, const SetValue& s) {
  return std::visit([&](const auto& v) { return point_to_set_distance(h, v); }, s);
}

double directed_distance(const GridSet& a, const SetValue& b) {
  check_dim(a.dim(), set_dim(b), "directed_distance");
  if (a.is_empty()) return 0.0;
  if (set_is_empty(b)) return kInf;
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sup = std::max(sup, point_to_set_distance(a.point(i), b));
  }
  return sup;
}

namespace {

// All grid points of the box with spacing `step`, dim-major enumeration.
std::vector<double> box_grid(const Box& K, double step) {
  const int d = K.dim();
  std::vector<long long> counts(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    if (K.hi(k) < K.lo(k)) throw std::invalid_argument("pk_limit_estimate: bad box");
    counts[static_cast<std::size_t>(k)] =
        static_cast<long long>(std::floor((K.hi(k) - K.lo(k)) / step + 1e-9)) + 1;
  }
  std::vector<double> flat;
  std::vector<long long> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    for (int k = 0; k < d; ++k) {
      flat.push_back(K.lo(k) + step * static_cast<double>(idx[static_cast<std::size_t>(k)]));
    }
    int k = d - 1;
    for (; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < counts[static_cast<std::size_t>(k)]) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
    if (k < 0) break;
  }
  return flat;
}

// Finite stand-in for Lambda_n cap K: grid members for polyhedral sets,
// filtered points for grid sets.
GridSet intersect_with_box(const SetValue& s, const Box& K, const std::vector<double>& kgrid) {
  const int d = set_dim(s);
  std::vector<double> flat;
  if (std::holds_alternative<GridSet>(s)) {
    const GridSet& g = std::get<GridSet>(s);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (K.contains(g.point(i))) {
        Eigen::VectorXd p = g.point(i);
        flat.insert(flat.end(), p.data(), p.data() + d);
      }
    }
  } else {
    const PolyhedralSet& p = std::get<PolyhedralSet>(s);
    const std::size_t npts = kgrid.size() / static_cast<std::size_t>(d);
    for (std::size_t i = 0; i < npts; ++i) {
      Eigen::Map<const Eigen::VectorXd> q(kgrid.data() + i * static_cast<std::size_t>(d), d);
      if (p.contains(q)) flat.insert(flat.end(), q.data(), q.data() + d);
    }
  }
  return GridSet(d, std::move(flat));
}

bool nonincreasing(const std::vector<double>& v, double slack) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] <= v[i - 1] + slack)) return false;
  }
  return true;
}

}  // namespace

PkEstimate pk_limit_estimate(const SetSequence& seq, const Box& K,
                             const std::vector<long long>& n_schedule,
                             double grid_step, const PkOptions& opts) {
  if (n_schedule.size() < 3) {
    throw std::invalid_argument("pk_limit_estimate: schedule needs >= 3 entries");
  }
  for (std::size_t i = 1; i < n_schedule.size(); ++i) {
    if (n_schedule[i] <= n_schedule[i - 1]) {
      throw std::invalid_argument("pk_limit_estimate: schedule must be strictly increasing");
    }
  }
  if (!(grid_step > 0.0)) throw std::invalid_argument("pk_limit_estimate: grid_step must be positive");

  const int d = K.dim();
  const std::vector<double> kgrid = box_grid(K, grid_step);
  const std::size_t npts = kgrid.size() / static_cast<std::size_t>(d);

  std::vector<SetValue> sets;
  sets.reserve(n_schedule.size());
  for (long long n : n_schedule) {
    SetValue s = seq.at(n);
    check_dim(set_dim(s), d, "pk_limit_estimate");
    sets.push_back(std::move(s));
  }

  // Membership by distance to the last two indices of the schedule.  The
  // tiny margin keeps exact 2-step ties (which arise only through rounding
  // noise) deterministically outside.
  const double threshold = 2.0 * grid_step - 1e-12;
  const SetValue& last1 = sets[sets.size() - 1];
  const SetValue& last2 = sets[sets.size() - 2];
  std::vector<double> members;
  for (std::size_t i = 0; i < npts; ++i) {
    Eigen::Map<const Eigen::VectorXd> q(kgrid.data() + i * static_cast<std::size_t>(d), d);
    const double d1 = point_to_set_distance(q, last1);
    if (d1 >= threshold) continue;
    const double d2 = point_to_set_distance(q, last2);
    if (std::max(d1, d2) < threshold) {
      members.insert(members.end(), q.data(), q.data() + d);
    }
  }

  PkEstimate est{GridSet(d, std::move(members)), {}};
  est.diagnostics.schedule = n_schedule;
  const SetValue est_value = est.limit;
  bool all_empty_in_box = true;
  for (const SetValue& s : sets) {
    est.diagnostics.limit_to_seq.push_back(directed_distance(est.limit, s));
    GridSet in_box = intersect_with_box(s, K, kgrid);
    if (!in_box.is_empty()) all_empty_in_box = false;
    est.diagnostics.seq_to_limit.push_back(directed_distance(in_box, est_value));
  }

  const double tol = opts.convergence_tol > 0.0 ? opts.convergence_tol : 2.0 * grid_step;
  const double slack = opts.monotone_slack > 0.0 ? opts.monotone_slack : grid_step;
  if (est.limit.is_empty()) {
    est.diagnostics.converged = all_empty_in_box;
  } else {
    const auto& a = est.diagnostics.limit_to_seq;
    const auto& b = est.diagnostics.seq_to_limit;
    est.diagnostics.converged = nonincreasing(a, slack) && nonincreasing(b, slack) &&
                                std::isfinite(a.front()) && std::isfinite(b.front()) &&
                                a.back() <= tol && b.back() <= tol;
  }
  return est;
}

GridSet rescaled_break_set(long long T, long long k0, double vT, double lambda1,
                           double lambda2) {
  if (!(lambda1 > 0.0 && lambda1 < lambda2 && lambda2 < 1.0)) {
    throw std::invalid_argument("rescaled_break_set: need 0 < lambda1 < lambda2 < 1");
  }
  if (k0 < 1 || k0 > T) throw std::invalid_argument("rescaled_break_set: k0 out of range");
  if (!(vT > 0.0)) throw std::invalid_argument("rescaled_break_set: vT must be positive");
  const long long klo =
      static_cast<long long>(std::floor(lambda1 * static_cast<double>(T) + 1e-9));
  const long long khi =
      static_cast<long long>(std::floor(lambda2 * static_cast<double>(T) + 1e-9));
  const double v2 = vT * vT;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(khi - klo + 1));
  for (long long k = klo; k <= khi; ++k) {
    pts.push_back(v2 * static_cast<double>(k - k0));
  }
  return GridSet::from_1d(std::move(pts));
}

PolyhedralSet linearized_boundary_set(const Eigen::VectorXd& b, const Eigen::MatrixXd& G) {
  return PolyhedralSet(G, b);
}

MfcqResult mfcq_check(const PolyhedralSet& p, double tol) {
  MfcqResult res;
  const int d = p.dim();
  const int m = p.num_active();
  if (m == 0) {
    res.holds = true;
    res.witness = Eigen::VectorXd::Zero(d);
    res.slack = std::numeric_limits<double>::infinity();
    return res;
  }
  // Maximize the minimum slack t over (lambda, t) in the unit box:
  //   b_j + g_j'lambda + t <= 0,  |lambda_i| <= 1,  t <= 1.
  const Eigen::MatrixXd Ga = p.active_G();
  const Eigen::VectorXd ba = p.active_b();
  const int rows = m + 2 * d + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, d + 1);
  Eigen::VectorXd u(rows);
  A.topLeftCorner(m, d) = Ga;
  A.topRightCorner(m, 1).setOnes();
  u.head(m) = -ba;
  for (int i = 0; i < d; ++i) {
    A(m + 2 * i, i) = 1.0;
    u(m + 2 * i) = 1.0;
    A(m + 2 * i + 1, i) = -1.0;
    u(m + 2 * i + 1) = 1.0;
  }
  A(rows - 1, d) = 1.0;
  u(rows - 1) = 1.0;

  const double eps = 1e-8;  // regularizer; keeps the program strictly convex
  Eigen::MatrixXd V = eps * Eigen::MatrixXd::Identity(d + 1, d + 1);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(d + 1);
  z(d) = 1.0;
  QpResult r = solve_qp(V, z, A, u, Eigen::VectorXd::Zero(d + 1),
                        40 * rows * (d + 1));
  res.witness = r.h.head(d);
  res.slack = (-(ba + Ga * res.witness)).minCoeff();
  res.holds = res.slack > tol;
  return res;
}

WeakIdLimitSets weakid_limit_sets(const Eigen::VectorXd& b0,
                                  const Eigen::MatrixXd& A_beta,
                                  const Eigen::MatrixXd& A_pi,
                                  const Eigen::VectorXd& pi0,
                                  const Eigen::VectorXd& drift_b,
                                  const Eigen::MatrixXd& G_beta) {
  if (A_beta.rows() != b0.size() || A_pi.rows() != b0.size() || A_pi.cols() != pi0.size()) {
    throw std::invalid_argument("weakid_limit_sets: inconsistent constraint dimensions");
  }
  Eigen::VectorXd b_at_pi0 = b0;
  for (int j = 0; j < b0.size(); ++j) {
    if (std::isfinite(b0(j))) b_at_pi0(j) += A_pi.row(j).dot(pi0);
  }
  WeakIdLimitSets out{linearized_boundary_set(b_at_pi0, A_beta),
                      linearized_boundary_set(drift_b, G_beta)};
  MfcqResult m = mfcq_check(out.b_semistrong);
  if (!m.holds) {
    out.mfcq_ok = false;
    out.warning = "MFCQ fails for B^SS: semi-strong limit hypothesis unmet";
  }
  return out;
}

}  // namespace argmaxlab
