#include "argmaxlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "argmaxlab/parallel.hpp"
#include "argmaxlab/process.hpp"

namespace argmaxlab {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<double> report_quantiles(const EmpiricalDist& d) {
  std::vector<double> q(kNumReportQuantiles);
  for (int i = 0; i < kNumReportQuantiles; ++i) q[static_cast<std::size_t>(i)] = d.quantile(kReportQuantiles[i]);
  return q;
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

InvariantCheck upper_bound_check(std::string name, const std::vector<double>& xs,
                                 double bound, double tol = 1e-9) {
  InvariantCheck c;
  c.name = std::move(name);
  c.bound = bound;
  c.observed = xs.empty() ? -std::numeric_limits<double>::infinity()
                          : *std::max_element(xs.begin(), xs.end());
  c.pass = c.observed <= bound + tol;
  return c;
}

InvariantCheck fraction_check(std::string name, double observed, double target,
                              double tol) {
  InvariantCheck c;
  c.name = std::move(name);
  c.observed = observed;
  c.bound = target;
  c.pass = std::fabs(observed - target) <= tol;
  return c;
}

}  // namespace

bool MCReport::pass() const {
  for (const auto& c : comparisons) {
    if (!c.pass) return false;
  }
  for (const auto& i : invariants) {
    if (!i.pass) return false;
  }
  return true;
}

KsComparison compare_samples(std::string name, const std::vector<double>& finite,
                             const std::vector<double>& limit, double tol) {
  EmpiricalDist a(finite), b(limit);
  KsComparison c;
  c.name = std::move(name);
  c.ks = ks_distance(a, b);
  c.tol = tol;
  c.pass = c.ks <= tol;
  c.quantiles_a = report_quantiles(a);
  c.quantiles_b = report_quantiles(b);
  return c;
}

MCReport run_corollary1(const BreakDesign& design, long long reps, long long limit_N,
                        int threads) {
  design.validate();
  Stopwatch sw;
  const bool interior = design.regime == BreakRegime::Interior;
  MCReport rep;
  rep.experiment_id = interior ? "corollary1a" : "corollary1b";
  rep.base_seed = design.seed;
  rep.reps = reps;
  rep.limit_draws = limit_N;

  std::vector<double> s_hat(static_cast<std::size_t>(reps));
  std::vector<char> tied(static_cast<std::size_t>(reps), 0);
  parallel_for(reps, threads, [&](long long r) {
    const BreakData data = simulate_break_data(design, derive_rep_seed(design.seed, static_cast<std::uint64_t>(r)));
    const BreakFitResult fit = estimate_break(data, design);
    s_hat[static_cast<std::size_t>(r)] = fit.s_hat;
    tied[static_cast<std::size_t>(r)] = fit.tie ? 1 : 0;
  });

  const ArgmaxConstraint constraint =
      interior ? ArgmaxConstraint(FullLine{}) : ArgmaxConstraint(UpperBound{design.a});
  LimitSamplerConfig cfg;
  cfg.draws = limit_N;
  cfg.threads = threads;
  const LimitArgmaxSample lim =
      sample_limit_argmax(design.limit_spec(), constraint, limit_stream_seed(design.seed), cfg);

  rep.tie_count = std::accumulate(tied.begin(), tied.end(), 0LL) + lim.tie_count;
  rep.saturation_fraction = lim.saturation_fraction;
  rep.saturation_warning = lim.saturation_warning;

  rep.comparisons.push_back(compare_samples("s_hat_vs_limit", s_hat, lim.argmax,
                                            interior ? 0.08 : 0.10));
  if (interior) {
    std::vector<double> neg_fin(s_hat.size()), neg_lim(lim.argmax.size());
    for (std::size_t i = 0; i < s_hat.size(); ++i) neg_fin[i] = -s_hat[i];
    for (std::size_t i = 0; i < lim.argmax.size(); ++i) neg_lim[i] = -lim.argmax[i];
    rep.comparisons.push_back(compare_samples("finite_symmetry", s_hat, neg_fin, 0.05));
    rep.comparisons.push_back(compare_samples("limit_symmetry", lim.argmax, neg_lim, 0.05));
  } else {
    rep.invariants.push_back(upper_bound_check("limit_draws_le_a", lim.argmax, design.a, 1e-12));
    const double v2 = design.vT() * design.vT();
    const double cap = v2 * static_cast<double>(design.trim_hi() - design.k0());
    rep.invariants.push_back(upper_bound_check("finite_draws_le_trim_cap", s_hat, cap, 1e-12));
    if (design.a < 0.0) {
      long long below = 0;
      for (double s : s_hat) below += (s <= 0.0) ? 1 : 0;
      InvariantCheck c;
      c.name = "mass_below_zero_ge_99pct";
      c.observed = static_cast<double>(below) / static_cast<double>(reps);
      c.bound = 0.99;
      c.pass = c.observed >= c.bound;
      rep.invariants.push_back(c);
    }
  }
  {
    InvariantCheck c;
    c.name = "limit_saturation_below_threshold";
    c.observed = lim.saturation_fraction;
    c.bound = 1e-3;
    c.pass = !lim.saturation_warning;
    rep.invariants.push_back(c);
  }

  rep.samples.emplace_back("finite_s_hat", std::move(s_hat));
  rep.samples.emplace_back("limit_s_hat", lim.argmax);
  rep.wall_seconds = sw.seconds();
  return rep;
}

MCReport run_corollary2(const BoundaryDesign& design, long long reps, long long limit_N,
                        int threads) {
  design.validate();
  Stopwatch sw;
  const int d = design.dim();
  MCReport rep;
  rep.experiment_id = "corollary2";
  rep.base_seed = design.seed;
  rep.reps = reps;
  rep.limit_draws = limit_N;

  const PolyhedralSet lam = design.limit_set();
  const Eigen::MatrixXd A = lam.active_G();
  const Eigen::VectorXd u = -lam.active_b();

  std::vector<std::vector<double>> h_fin(static_cast<std::size_t>(d),
                                         std::vector<double>(static_cast<std::size_t>(reps)));
  std::vector<char> fin_bound(static_cast<std::size_t>(reps), 0);
  parallel_for(reps, threads, [&](long long r) {
    const BoundaryFit fit =
        fit_boundary_model(design, derive_rep_seed(design.seed, static_cast<std::uint64_t>(r)));
    for (int j = 0; j < d; ++j) h_fin[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] = fit.h(j);
    if (A.rows() > 0) {
      const Eigen::VectorXd slack = u - A * fit.h;
      fin_bound[static_cast<std::size_t>(r)] = (slack.minCoeff() <= 1e-6) ? 1 : 0;
    }
  });

  const PolyhedralLimitSample lim = sample_polyhedral_limit(
      design.limit_objective(), lam, limit_N, limit_stream_seed(design.seed), threads);
  std::vector<std::vector<double>> h_lim(static_cast<std::size_t>(d),
                                         std::vector<double>(lim.draws.size()));
  long long lim_bound = 0;
  for (std::size_t i = 0; i < lim.draws.size(); ++i) {
    for (int j = 0; j < d; ++j) h_lim[static_cast<std::size_t>(j)][i] = lim.draws[i](j);
    if (A.rows() > 0 && (u - A * lim.draws[i]).minCoeff() <= 1e-6) ++lim_bound;
  }

  for (int j = 0; j < d; ++j) {
    rep.comparisons.push_back(compare_samples("h_coord" + std::to_string(j + 1),
                                              h_fin[static_cast<std::size_t>(j)],
                                              h_lim[static_cast<std::size_t>(j)], 0.05));
  }

  if (A.rows() == 1) {
    // One active affine constraint a'h <= u: the unconstrained optimum is Z,
    // so the bound binds with probability Phi(-u / (sd ||a||)).
    const double c_eff = u(0) / (design.noise_sd * A.row(0).norm());
    const double oracle = normal_cdf(-c_eff);
    const double f_fin = static_cast<double>(std::accumulate(fin_bound.begin(), fin_bound.end(), 0LL)) /
                         static_cast<double>(reps);
    const double f_lim = static_cast<double>(lim_bound) / static_cast<double>(lim.draws.size());
    rep.invariants.push_back(fraction_check("finite_boundary_mass_vs_oracle", f_fin, oracle, 0.02));
    rep.invariants.push_back(fraction_check("limit_boundary_mass_vs_oracle", f_lim, oracle, 0.02));
  }
  {
    InvariantCheck c;
    c.name = "limit_kkt_residual";
    c.observed = lim.max_kkt_residual;
    c.bound = 1e-8;
    c.pass = c.observed <= c.bound;
    rep.invariants.push_back(c);
  }

  for (int j = 0; j < d; ++j) {
    rep.samples.emplace_back("finite_h" + std::to_string(j + 1), std::move(h_fin[static_cast<std::size_t>(j)]));
    rep.samples.emplace_back("limit_h" + std::to_string(j + 1), std::move(h_lim[static_cast<std::size_t>(j)]));
  }
  rep.wall_seconds = sw.seconds();
  return rep;
}

MCReport run_corollary3(const WeakIdDesign& design, long long reps, long long limit_N,
                        int threads) {
  design.validate();
  Stopwatch sw;
  const bool weak = design.regime == WeakIdRegime::Weak;
  MCReport rep;
  rep.experiment_id = weak ? "corollary3-weak" : "corollary3-semistrong";
  rep.base_seed = design.seed;
  rep.reps = reps;
  rep.limit_draws = limit_N;

  std::vector<double> beta_fin(static_cast<std::size_t>(reps));
  std::vector<double> hp1_fin(static_cast<std::size_t>(reps));
  std::vector<double> hp2_fin(static_cast<std::size_t>(reps));
  std::vector<char> feas(static_cast<std::size_t>(reps), 0);
  parallel_for(reps, threads, [&](long long r) {
    const WeakIdFit fit =
        fit_weakid_model(design, derive_rep_seed(design.seed, static_cast<std::uint64_t>(r)));
    beta_fin[static_cast<std::size_t>(r)] = weak ? fit.beta_hat : fit.h_beta_ss;
    hp1_fin[static_cast<std::size_t>(r)] = fit.h_pi1;
    hp2_fin[static_cast<std::size_t>(r)] = fit.h_pi2;
    feas[static_cast<std::size_t>(r)] =
        (fit.beta_hat >= -kFeasTol && fit.beta_hat <= fit.pi2_hat + kFeasTol) ? 1 : 0;
  });

  const WeakIdLimitDraws lim =
      sample_weakid_limit(design, limit_N, limit_stream_seed(design.seed), threads);

  const std::string beta_name = weak ? "beta_hat" : "h_beta";
  rep.comparisons.push_back(compare_samples(beta_name, beta_fin, lim.beta_coord, 0.10));
  rep.comparisons.push_back(compare_samples("h_pi1", hp1_fin, lim.h_pi1, 0.10));
  rep.comparisons.push_back(compare_samples("h_pi2", hp2_fin, lim.h_pi2, 0.10));

  {
    InvariantCheck c;
    c.name = "beta_in_[0,pi2]_all_reps";
    c.observed = static_cast<double>(std::accumulate(feas.begin(), feas.end(), 0LL));
    c.bound = static_cast<double>(reps);
    c.pass = c.observed == c.bound;
    rep.invariants.push_back(c);
  }

  rep.samples.emplace_back("finite_" + beta_name, std::move(beta_fin));
  rep.samples.emplace_back("finite_h_pi1", std::move(hp1_fin));
  rep.samples.emplace_back("finite_h_pi2", std::move(hp2_fin));
  rep.samples.emplace_back("limit_" + beta_name, lim.beta_coord);
  rep.samples.emplace_back("limit_h_pi1", lim.h_pi1);
  rep.samples.emplace_back("limit_h_pi2", lim.h_pi2);
  rep.wall_seconds = sw.seconds();
  return rep;
}

MCReport run_value_convergence(const BreakDesign& design, long long reps, long long limit_N,
                               int threads) {
  design.validate();
  Stopwatch sw;
  const bool interior = design.regime == BreakRegime::Interior;
  MCReport rep;
  rep.experiment_id = "value-convergence";
  rep.base_seed = design.seed;
  rep.reps = reps;
  rep.limit_draws = limit_N;

  std::vector<double> sup_fin(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](long long r) {
    const BreakData data = simulate_break_data(design, derive_rep_seed(design.seed, static_cast<std::uint64_t>(r)));
    const BreakObjective obj(data);
    double vmax = -std::numeric_limits<double>::infinity();
    for (long long k = design.trim_lo(); k <= design.trim_hi(); ++k) vmax = std::max(vmax, obj.v_t(k));
    sup_fin[static_cast<std::size_t>(r)] = vmax - obj.v_t(design.k0());
  });

  const ArgmaxConstraint constraint =
      interior ? ArgmaxConstraint(FullLine{}) : ArgmaxConstraint(UpperBound{design.a});
  LimitSamplerConfig cfg;
  cfg.draws = limit_N;
  cfg.threads = threads;
  const LimitArgmaxSample lim =
      sample_limit_argmax(design.limit_spec(), constraint, limit_stream_seed(design.seed), cfg);

  rep.saturation_fraction = lim.saturation_fraction;
  rep.saturation_warning = lim.saturation_warning;
  rep.tie_count = lim.tie_count;
  rep.comparisons.push_back(compare_samples("sup_vs_limit_sup", sup_fin, lim.value, 0.10));
  rep.samples.emplace_back("finite_sup", std::move(sup_fin));
  rep.samples.emplace_back("limit_sup", lim.value);
  rep.wall_seconds = sw.seconds();
  return rep;
}

}  // namespace argmaxlab
