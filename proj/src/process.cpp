#include "argmaxlab/process.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "argmaxlab/parallel.hpp"
#include "argmaxlab/qp.hpp"

namespace argmaxlab {

namespace {

Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols() || !m.isApprox(m.transpose(), 1e-10)) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(std::string(name) + " must be positive definite");
  }
  return llt.matrixL();
}

// PSD square root factor via eigendecomposition (allows singular covariances).
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols() || !m.isApprox(m.transpose(), 1e-10)) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-10) {
      throw std::invalid_argument(std::string(name) + " must be positive semidefinite");
    }
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace

GaussianSpec::GaussianSpec(Eigen::MatrixXd omega1, Eigen::MatrixXd omega2,
                           Eigen::MatrixXd q1, Eigen::MatrixXd q2,
                           Eigen::VectorXd delta0)
    : omega1_(std::move(omega1)),
      omega2_(std::move(omega2)),
      q1_(std::move(q1)),
      q2_(std::move(q2)),
      delta0_(std::move(delta0)) {
  chol1_ = checked_cholesky(omega1_, "Omega1");
  chol2_ = checked_cholesky(omega2_, "Omega2");
  checked_cholesky(q1_, "Q1");
  checked_cholesky(q2_, "Q2");
  if (delta0_.size() != omega1_.rows() || delta0_.size() != q1_.rows() ||
      omega2_.rows() != omega1_.rows() || q2_.rows() != q1_.rows()) {
    throw std::invalid_argument("GaussianSpec: dimension mismatch");
  }
  if (delta0_.norm() == 0.0) throw std::invalid_argument("GaussianSpec: delta0 must be nonzero");
  drift1_ = delta0_.dot(q1_ * delta0_);
  drift2_ = delta0_.dot(q2_ * delta0_);
  nv1_ = 4.0 * delta0_.dot(omega1_ * delta0_);
  nv2_ = 4.0 * delta0_.dot(omega2_ * delta0_);
}

QuadraticLimit::QuadraticLimit(Eigen::MatrixXd V, Eigen::MatrixXd z_cov,
                               Eigen::VectorXd z_mean)
    : V_(std::move(V)), z_cov_(std::move(z_cov)), z_mean_(std::move(z_mean)) {
  checked_cholesky(V_, "V");
  chol_ = psd_factor(z_cov_, "Z_cov");
  if (V_.rows() != z_mean_.size() || z_cov_.rows() != z_mean_.size()) {
    throw std::invalid_argument("QuadraticLimit: dimension mismatch");
  }
}

Eigen::VectorXd QuadraticLimit::draw_z(Rng& rng) const {
  Eigen::VectorXd g(z_mean_.size());
  for (int i = 0; i < g.size(); ++i) g(i) = rng.normal();
  return z_mean_ + chol_ * g;
}

VectorPathSample sample_scaled_bm(const std::vector<double>& grid,
                                  const Eigen::MatrixXd& omega, std::uint64_t seed) {
  if (grid.empty() || grid.front() != 0.0) {
    throw std::invalid_argument("sample_scaled_bm: grid must start at 0");
  }
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1])) {
      throw std::invalid_argument("sample_scaled_bm: grid must be strictly increasing");
    }
  }
  const Eigen::MatrixXd L = checked_cholesky(omega, "Omega");
  const int p = static_cast<int>(omega.rows());
  VectorPathSample path;
  path.grid = grid;
  path.seed = seed;
  path.process_id = "scaled_bm";
  path.values.resize(grid.size());
  path.values[0] = Eigen::VectorXd::Zero(p);
  Rng rng(seed);
  Eigen::VectorXd g(p);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    for (int i = 0; i < p; ++i) g(i) = rng.normal();
    const double dt = grid[j] - grid[j - 1];
    path.values[j] = path.values[j - 1] + std::sqrt(dt) * (L * g);
  }
  return path;
}

PathSample limit_process_M(const GaussianSpec& spec, double C, double step,
                           std::uint64_t seed, const LimitProcessOptions& opts) {
  if (!(C > 0.0)) throw std::invalid_argument("limit_process_M: C must be positive");
  if (!(step > 0.0 && step < C)) {
    throw std::invalid_argument("limit_process_M: need 0 < step < C");
  }
  const long long m = static_cast<long long>(std::floor(C / step + 1e-9));
  std::vector<double> half_grid(static_cast<std::size_t>(m) + 1);
  for (long long k = 0; k <= m; ++k) half_grid[static_cast<std::size_t>(k)] = step * static_cast<double>(k);

  VectorPathSample b1 = sample_scaled_bm(half_grid, spec.omega1(), mix64(seed + GOLDEN_GAMMA));
  VectorPathSample b2 = sample_scaled_bm(half_grid, spec.omega2(), mix64(seed + 2 * GOLDEN_GAMMA));

  PathSample path;
  path.seed = seed;
  path.process_id = "limit_process_M";
  path.grid.reserve(2 * static_cast<std::size_t>(m) + 1);
  path.values.reserve(2 * static_cast<std::size_t>(m) + 1);
  const Eigen::VectorXd& d0 = spec.delta0();
  for (long long k = -m; k <= m; ++k) {
    const double s = step * static_cast<double>(k);
    path.grid.push_back(s);
    if (k <= 0) {
      const double noise = opts.zero_b1 ? 0.0 : 2.0 * d0.dot(b1.values[static_cast<std::size_t>(-k)]);
      path.values.push_back(-std::fabs(s) * spec.drift1() + noise);
    } else {
      const double noise = opts.zero_b2 ? 0.0 : 2.0 * d0.dot(b2.values[static_cast<std::size_t>(k)]);
      path.values.push_back(-s * spec.drift2() + noise);
    }
  }
  return path;
}

ArgmaxResult argmax_over(const PathSample& path, const ArgmaxConstraint& constraint) {
  auto eligible = [&](double s) {
    if (std::holds_alternative<FullLine>(constraint)) return true;
    if (const auto* ub = std::get_if<UpperBound>(&constraint)) return s <= ub->a + kFeasTol;
    const GridSet& g = std::get<GridSet>(constraint);
    Eigen::VectorXd q(1);
    q(0) = s;
    return point_to_set_distance(q, g) <= kFeasTol;
  };
  double vmax = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    if (!eligible(path.grid[j])) continue;
    any = true;
    vmax = std::max(vmax, path.values[j]);
  }
  if (!any) throw std::runtime_error("argmax_over: constrained grid is empty");
  ArgmaxResult res;
  int hits = 0;
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    if (!eligible(path.grid[j])) continue;
    if (path.values[j] >= vmax - kTieTol) {
      if (hits == 0) {
        res.s = path.grid[j];
        res.value = path.values[j];
      }
      ++hits;
    }
  }
  res.tie = hits > 1;
  return res;
}

namespace {

// One constrained-argmax draw over the two-sided limit path, sampling the
// scalar projection 2 delta0'B_i directly (one normal per grid step; the
// same finite-dimensional law as the vector construction).
struct ScalarDrawResult {
  double s;
  double value;
  bool tie;
  bool saturated;
};

ScalarDrawResult scalar_limit_draw(const GaussianSpec& spec, double upper_bound,
                                   bool has_bound, long long m, double step,
                                   std::uint64_t seed, std::vector<double>& left,
                                   std::vector<double>& right) {
  Rng rng(seed);
  const double sd1 = std::sqrt(step * spec.noise_var1());
  const double sd2 = std::sqrt(step * spec.noise_var2());
  left[0] = 0.0;
  for (long long k = 1; k <= m; ++k) {
    left[static_cast<std::size_t>(k)] =
        left[static_cast<std::size_t>(k - 1)] - step * spec.drift1() + sd1 * rng.normal();
  }
  right[0] = 0.0;
  for (long long k = 1; k <= m; ++k) {
    right[static_cast<std::size_t>(k)] =
        right[static_cast<std::size_t>(k - 1)] - step * spec.drift2() + sd2 * rng.normal();
  }

  double vmax = -std::numeric_limits<double>::infinity();
  bool any = false;
  auto consider_max = [&](double s, double v) {
    if (has_bound && s > upper_bound + kFeasTol) return;
    any = true;
    vmax = std::max(vmax, v);
  };
  for (long long k = m; k >= 0; --k) consider_max(-step * static_cast<double>(k), left[static_cast<std::size_t>(k)]);
  for (long long k = 1; k <= m; ++k) consider_max(step * static_cast<double>(k), right[static_cast<std::size_t>(k)]);
  if (!any) throw std::runtime_error("sample_limit_argmax: constraint excludes the whole grid");

  ScalarDrawResult res{0.0, vmax, false, false};
  int hits = 0;
  auto consider_arg = [&](double s, double v) {
    if (has_bound && s > upper_bound + kFeasTol) return;
    if (v >= vmax - kTieTol) {
      if (hits == 0) res.s = s;
      ++hits;
    }
  };
  for (long long k = m; k >= 0; --k) consider_arg(-step * static_cast<double>(k), left[static_cast<std::size_t>(k)]);
  for (long long k = 1; k <= m; ++k) consider_arg(step * static_cast<double>(k), right[static_cast<std::size_t>(k)]);
  res.tie = hits > 1;
  const double Ceff = step * static_cast<double>(m);
  res.saturated = std::fabs(std::fabs(res.s) - Ceff) <= step + kFeasTol;
  return res;
}

}  // namespace

LimitArgmaxSample sample_limit_argmax(const GaussianSpec& spec,
                                      const ArgmaxConstraint& constraint,
                                      std::uint64_t seed,
                                      const LimitSamplerConfig& cfg) {
  if (cfg.draws < 1) throw std::invalid_argument("sample_limit_argmax: draws must be >= 1");
  const double C = cfg.C > 0.0 ? cfg.C : 40.0 / std::min(spec.drift1(), spec.drift2());
  const double step = cfg.step;
  if (!(step > 0.0 && step < C)) throw std::invalid_argument("sample_limit_argmax: need 0 < step < C");
  const long long m = static_cast<long long>(std::floor(C / step + 1e-9));

  const bool has_bound = std::holds_alternative<UpperBound>(constraint);
  const double bound = has_bound ? std::get<UpperBound>(constraint).a : 0.0;
  const bool grid_constraint = std::holds_alternative<GridSet>(constraint);

  LimitArgmaxSample out;
  out.C = step * static_cast<double>(m);
  out.step = step;
  out.argmax.resize(static_cast<std::size_t>(cfg.draws));
  out.value.resize(static_cast<std::size_t>(cfg.draws));
  std::vector<std::uint8_t> saturated(static_cast<std::size_t>(cfg.draws), 0);
  std::vector<std::uint8_t> tied(static_cast<std::size_t>(cfg.draws), 0);

  if (!grid_constraint) {
    // Per-thread scratch buffers; draws stay deterministic because every
    // replication is seeded independently of the thread that runs it.
    parallel_for(cfg.draws, cfg.threads, [&](long long i) {
      thread_local std::vector<double> lb, rb;
      if (lb.size() < static_cast<std::size_t>(m) + 1) {
        lb.resize(static_cast<std::size_t>(m) + 1);
        rb.resize(static_cast<std::size_t>(m) + 1);
      }
      ScalarDrawResult r = scalar_limit_draw(spec, bound, has_bound, m, step,
                                             derive_rep_seed(seed, static_cast<std::uint64_t>(i)),
                                             lb, rb);
      out.argmax[static_cast<std::size_t>(i)] = r.s;
      out.value[static_cast<std::size_t>(i)] = r.value;
      saturated[static_cast<std::size_t>(i)] = r.saturated ? 1 : 0;
      tied[static_cast<std::size_t>(i)] = r.tie ? 1 : 0;
    });
  } else {
    for (long long i = 0; i < cfg.draws; ++i) {
      PathSample path = limit_process_M(spec, C, step,
                                        derive_rep_seed(seed, static_cast<std::uint64_t>(i)));
      ArgmaxResult r = argmax_over(path, constraint);
      out.argmax[static_cast<std::size_t>(i)] = r.s;
      out.value[static_cast<std::size_t>(i)] = r.value;
      tied[static_cast<std::size_t>(i)] = r.tie ? 1 : 0;
      saturated[static_cast<std::size_t>(i)] =
          std::fabs(std::fabs(r.s) - out.C) <= step + kFeasTol ? 1 : 0;
    }
  }

  long long sat = 0;
  for (std::size_t i = 0; i < saturated.size(); ++i) {
    sat += saturated[i];
    out.tie_count += tied[i];
  }
  out.saturation_fraction = static_cast<double>(sat) / static_cast<double>(cfg.draws);
  out.saturation_warning = out.saturation_fraction >= cfg.saturation_threshold;
  return out;
}

PolyhedralArgmax polyhedral_argmax(const QuadraticLimit& q, const Eigen::VectorXd& z_draw,
                                   const PolyhedralSet& p) {
  if (p.dim() != q.dim()) throw std::invalid_argument("polyhedral_argmax: dimension mismatch");
  QpResult r = solve_qp(q.V(), z_draw, p.active_G(), -p.active_b(),
                        Eigen::VectorXd::Zero(p.dim()),
                        10 * std::max(1, p.num_active()) * std::max(1, p.dim()) + 20);
  if (r.kkt_residual > 1e-8 || r.comp_slackness > 1e-8) {
    throw std::runtime_error("polyhedral_argmax: KKT certificate failed");
  }
  return PolyhedralArgmax{r.h, r.value, r.kkt_residual, r.comp_slackness};
}

PolyhedralLimitSample sample_polyhedral_limit(const QuadraticLimit& q,
                                              const PolyhedralSet& p, long long N,
                                              std::uint64_t seed, int threads) {
  if (N < 1) throw std::invalid_argument("sample_polyhedral_limit: N must be >= 1");
  PolyhedralLimitSample out;
  out.draws.resize(static_cast<std::size_t>(N));
  out.values.resize(static_cast<std::size_t>(N));
  std::vector<double> kkt(static_cast<std::size_t>(N), 0.0);
  parallel_for(N, threads, [&](long long i) {
    Rng rng(derive_rep_seed(seed, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd z = q.draw_z(rng);
    PolyhedralArgmax r = polyhedral_argmax(q, z, p);
    out.draws[static_cast<std::size_t>(i)] = r.h;
    out.values[static_cast<std::size_t>(i)] = r.value;
    kkt[static_cast<std::size_t>(i)] = r.kkt_residual;
  });
  for (double v : kkt) out.max_kkt_residual = std::max(out.max_kkt_residual, v);
  return out;
}

}  // namespace argmaxlab
