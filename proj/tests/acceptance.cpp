// Acceptance suite: one line per criterion, pinned tolerances, exit 0 only
// when every criterion passes.  Heavy Monte Carlo settings follow the
// documented defaults of the experiment kinds.

#include <argmaxlab/experiments.hpp>
#include <argmaxlab/harness.hpp>
#include <argmaxlab/kernels.hpp>
#include <argmaxlab/process.hpp>
#include <argmaxlab/qp.hpp>
#include <argmaxlab/rng.hpp>
#include <argmaxlab/sets.hpp>
#include <argmaxlab/stats.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace argmaxlab;

namespace {

constexpr std::uint64_t kAcceptanceSeed = 20260823;

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

bool g_all_pass = true;

void report(int id, bool pass, const std::string& detail, double secs) {
  g_all_pass = g_all_pass && pass;
  std::printf("[%2d] %s  %s  (%.1fs)\n", id, pass ? "PASS" : "FAIL", detail.c_str(), secs);
  std::fflush(stdout);
}

Eigen::VectorXd v1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

BreakDesign break_design(BreakRegime regime, long long T, double a) {
  BreakDesign d;
  d.T = T;
  d.regime = regime;
  d.tau = 0.5;
  d.a = a;
  d.beta = (Eigen::VectorXd(2) << 1.0, 0.5).finished();
  d.delta0 = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  d.seed = kAcceptanceSeed;
  return d;
}

std::string ks_summary(const MCReport& rep) {
  std::ostringstream os;
  for (const auto& c : rep.comparisons) {
    os << c.name << " ks=" << c.ks << (c.pass ? "" : " [FAIL]") << "  ";
  }
  for (const auto& i : rep.invariants) {
    if (!i.pass) os << i.name << " obs=" << i.observed << " [FAIL]  ";
  }
  return os.str();
}

// --- criterion 1: the intersection counterexample (Remark 3) ---------------

void criterion1() {
  Timer t;
  Box K;
  K.lo = v1(0.0);
  K.hi = v1(1.0);
  const std::vector<long long> sched = {100, 1000, 6000, 10000};
  const double step = 1e-4;
  auto plain = pk_limit_estimate(make_pk_family("remark3", 0.25, 0.15, 0.85, 0.0), K,
                                 sched, step);
  auto inter = pk_limit_estimate(make_pk_family("remark3-intersected", 0.25, 0.15, 0.85, 0.0),
                                 K, sched, step);
  double diag =
      std::max(plain.diagnostics.limit_to_seq.back(), plain.diagnostics.seq_to_limit.back());
  diag = std::max({diag, inter.diagnostics.limit_to_seq.back(),
                   inter.diagnostics.seq_to_limit.back()});
  // Limits up to the membership fattening: {0, 1} and {0}.
  const GridSet truth_plain = GridSet::from_1d({0.0, 1.0});
  const GridSet truth_inter = GridSet::from_1d({0.0});
  const double haus_plain = std::max(directed_distance(plain.limit, truth_plain),
                                     directed_distance(truth_plain, plain.limit));
  const double haus_inter = std::max(directed_distance(inter.limit, truth_inter),
                                     directed_distance(truth_inter, inter.limit));
  const double secs = t.seconds();
  const bool pass = plain.diagnostics.converged && inter.diagnostics.converged &&
                    diag < 1e-3 && haus_plain <= 1e-3 && haus_inter <= 1e-3 && secs < 1.0;
  std::ostringstream os;
  os << "pk counterexample: final diag=" << diag << " d_H(plain,{0,1})=" << haus_plain
     << " d_H(intersected,{0})=" << haus_inter;
  report(1, pass, os.str(), secs);
}

// --- criterion 2: Lemma 2 rescaled break-set limits ------------------------

void criterion2() {
  Timer t;
  Box K;
  K.lo = v1(-3.0);
  K.hi = v1(3.0);
  const std::vector<long long> sched = {10000, 100000, 1000000};
  const double step = 0.01;
  bool pass = true;
  std::ostringstream os;
  os << "Lemma 2 set limits:";
  {
    auto est = pk_limit_estimate(make_pk_family("break-1a", 0.25, 0.15, 0.85, 0.0), K,
                                 sched, step);
    const bool full = est.diagnostics.converged && est.limit.size() == 601;
    pass = pass && full;
    os << " 1a full-grid=" << (full ? "yes" : "NO");
  }
  for (double a : {-0.5, 0.0, 1.0}) {
    auto est = pk_limit_estimate(make_pk_family("break-1b", 0.25, 0.15, 0.85, a), K,
                                 sched, step);
    double max_pt = -1e300;
    for (std::size_t i = 0; i < est.limit.size(); ++i)
      max_pt = std::max(max_pt, est.limit.point(i)(0));
    // Full coverage below a, boundary overshoot at most one grid step.
    bool covered = est.diagnostics.converged;
    for (double h = -3.0; h <= a + 1e-12; h += step)
      covered = covered && point_to_set_distance(v1(h), est.limit) <= 1e-9;
    const bool ok = covered && max_pt <= a + step + 1e-9;
    pass = pass && ok;
    os << " 1b(a=" << a << ") boundary_err=" << (max_pt - a) << (ok ? "" : " [FAIL]");
  }
  const double secs = t.seconds();
  pass = pass && secs < 10.0;
  report(2, pass, os.str(), secs);
}

// --- criteria 3-4: Corollary 1 ---------------------------------------------

void criterion3() {
  Timer t;
  auto rep = run_corollary1(break_design(BreakRegime::Interior, 2000, 0.0), 2000, 100000);
  report(3, rep.pass(), "Corollary 1(a): " + ks_summary(rep), t.seconds());
}

void criterion4() {
  Timer t;
  bool pass = true;
  std::ostringstream os;
  for (double a : {-1.0, 1.0}) {
    auto rep = run_corollary1(break_design(BreakRegime::NearEdge, 102400, a), 2000, 100000);
    pass = pass && rep.pass();
    os << "a=" << a << ": " << ks_summary(rep);
  }
  report(4, pass, "Corollary 1(b): " + os.str(), t.seconds());
}

// --- criterion 5: Corollary 2 ----------------------------------------------

void criterion5() {
  Timer t;
  bool pass = true;
  std::ostringstream os;
  auto run = [&](const char* tag, const Eigen::MatrixXd& G, const Eigen::VectorXd& drift) {
    BoundaryDesign d;
    d.n = 2000;
    d.G = G;
    d.g0 = Eigen::VectorXd::Zero(G.rows());
    d.theta0 = Eigen::VectorXd::Zero(G.cols());
    d.drift = drift;
    d.seed = kAcceptanceSeed;
    auto rep = run_corollary2(d, 2000, 100000);
    pass = pass && rep.pass();
    os << tag << ": " << ks_summary(rep);
  };
  const Eigen::MatrixXd Gs = (Eigen::MatrixXd(1, 1) << -1.0).finished();  // theta >= 0
  run("scalar b=0", Gs, Eigen::VectorXd::Zero(1));
  run("scalar b=-1", Gs, v1(1.0));  // limit bound (G drift) = -1
  const Eigen::MatrixXd G2 = (Eigen::MatrixXd(1, 2) << 1.0, 1.0).finished();  // l1+l2 <= 0
  run("2d b=0", G2, Eigen::VectorXd::Zero(2));
  run("2d b=-1", G2, (Eigen::VectorXd(2) << -1.0, 0.0).finished());
  const double secs = t.seconds();
  pass = pass && secs < 300.0;
  report(5, pass, "Corollary 2: " + os.str(), secs);
}

// --- criterion 6: Corollary 3 ----------------------------------------------

double beta_sd(WeakIdRegime regime, long long n, double beta_n, int reps) {
  WeakIdDesign d;
  d.n = n;
  d.regime = regime;
  d.beta_n = beta_n;
  d.pi2_0 = 0.5;
  double m = 0.0, s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double b = fit_weakid_model(d, derive_rep_seed(kAcceptanceSeed + 7,
                                                         static_cast<std::uint64_t>(r)))
                         .beta_hat;
    m += b;
    s2 += b * b;
  }
  m /= reps;
  return std::sqrt(std::max(0.0, s2 / reps - m * m));
}

void criterion6() {
  Timer t;
  bool pass = true;
  std::ostringstream os;
  {
    WeakIdDesign d;
    d.n = 4000;
    d.regime = WeakIdRegime::Weak;
    d.c = 1.0;
    d.beta_n = 0.25;
    d.pi2_0 = 0.5;
    d.seed = kAcceptanceSeed;
    auto rep = run_corollary3(d, 2000, 100000);
    pass = pass && rep.pass();
    os << "weak: " << ks_summary(rep);
  }
  {
    WeakIdDesign d;
    d.n = 4000;
    d.regime = WeakIdRegime::SemiStrong;
    d.c = 1.0;
    d.beta_n = 0.5;
    d.pi2_0 = 0.5;
    d.seed = kAcceptanceSeed;
    auto rep = run_corollary3(d, 2000, 100000);
    pass = pass && rep.pass();
    os << "semi-strong: " << ks_summary(rep);
  }
  // Two-rate contrast: the weak-regime spread is n-stable while the
  // semi-strong spread contracts between n = 1000 and n = 4000.
  const double weak_ratio = beta_sd(WeakIdRegime::Weak, 4000, 0.25, 300) /
                            beta_sd(WeakIdRegime::Weak, 1000, 0.25, 300);
  const double ss_ratio = beta_sd(WeakIdRegime::SemiStrong, 1000, 0.5, 300) /
                          beta_sd(WeakIdRegime::SemiStrong, 4000, 0.5, 300);
  const bool contrast = weak_ratio > 0.7 && weak_ratio < 1.4 && ss_ratio > 1.2;
  pass = pass && contrast;
  os << "two-rate: weak_sd_ratio=" << weak_ratio << " ss_sd_ratio=" << ss_ratio
     << (contrast ? "" : " [FAIL]");
  report(6, pass, "Corollary 3: " + os.str(), t.seconds());
}

// --- criterion 7: value convergence ----------------------------------------

void criterion7() {
  Timer t;
  bool pass = true;
  std::ostringstream os;
  {
    auto rep = run_value_convergence(break_design(BreakRegime::Interior, 50000, 0.0),
                                     1000, 50000);
    pass = pass && rep.pass();
    os << "1a: " << ks_summary(rep);
  }
  {
    auto rep = run_value_convergence(break_design(BreakRegime::NearEdge, 102400, -1.0),
                                     1000, 50000);
    pass = pass && rep.pass();
    os << "1b: " << ks_summary(rep);
  }
  report(7, pass, "value convergence: " + os.str(), t.seconds());
}

// --- criterion 8: QP oracle equivalence ------------------------------------

void criterion8() {
  Timer t;
  Rng rng(kAcceptanceSeed);
  bool pass = true;
  double worst_gap = 0.0, worst_kkt = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng.bits() % 3);
    const int m = 1 + static_cast<int>(rng.bits() % 4);
    Eigen::MatrixXd R(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) R(i, j) = rng.normal();
    const Eigen::MatrixXd V = R * R.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z(i) = 2.0 * rng.normal();
    Eigen::MatrixXd A(m, d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = rng.normal();
    Eigen::VectorXd u(m);
    for (int i = 0; i < m; ++i) u(i) = 2.0 * rng.uniform();
    const QpResult r = solve_qp(V, z, A, u, Eigen::VectorXd::Zero(d));
    worst_kkt = std::max(worst_kkt, r.kkt_residual);
    // Grid brute force over [-5, 5]^d.
    const int ppa = d == 1 ? 4001 : (d == 2 ? 201 : 41);
    const double lo = -5.0, step = 10.0 / (ppa - 1);
    double best = -1e300;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd h(d);
    while (true) {
      for (int j = 0; j < d; ++j) h(j) = lo + idx[static_cast<std::size_t>(j)] * step;
      if (((A * h - u).array() <= 1e-12).all())
        best = std::max(best, z.dot(h) - 0.5 * h.dot(V * h));
      int j = 0;
      for (; j < d; ++j) {
        if (++idx[static_cast<std::size_t>(j)] < ppa) break;
        idx[static_cast<std::size_t>(j)] = 0;
      }
      if (j == d) break;
    }
    worst_gap = std::max(worst_gap, best - r.value);
    pass = pass && r.value >= best - 2e-3 && r.kkt_residual <= 1e-8;
  }
  const double secs = t.seconds();
  pass = pass && secs < 30.0;
  std::ostringstream os;
  os << "qp vs brute force (1000 instances): worst_gap=" << worst_gap
     << " worst_kkt=" << worst_kkt;
  report(8, pass, os.str(), secs);
}

// --- criterion 9: exact invariants and reproducibility ---------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion9() {
  Timer t;
  Rng rng(kAcceptanceSeed + 9);
  bool sup_ok = true, inv_ok = true;
  // |sup f - sup g| <= sup |f - g| on 1000 random pairs, exact.
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.bits() % 64;
    std::vector<double> f(n), g(n);
    for (auto& v : f) v = 10.0 * rng.normal();
    for (auto& v : g) v = 10.0 * rng.normal();
    double mf = f[0], mg = g[0];
    for (double v : f) mf = std::max(mf, v);
    for (double v : g) mg = std::max(mg, v);
    sup_ok = sup_ok &&
             std::fabs(mf - mg) <= kernels::max_abs_diff(f.data(), g.data(), n);
  }
  // Argmax invariance under translation and positive scaling, 1000 paths.
  for (int trial = 0; trial < 1000; ++trial) {
    PathSample p;
    for (int j = 0; j < 41; ++j) {
      p.grid.push_back(-2.0 + 0.1 * j);
      p.values.push_back(rng.normal());
    }
    PathSample q = p;
    const double shift = 3.0 * rng.normal();
    const double scale = 0.25 + 2.0 * rng.uniform();
    for (auto& v : q.values) v = scale * v + shift;
    inv_ok = inv_ok && argmax_over(p, FullLine{}).s == argmax_over(q, FullLine{}).s;
  }
  // Reproducibility: the same config run twice emits byte-identical CSVs.
  std::ostringstream log;
  ExperimentConfig cfg = default_config("limit-sample");
  cfg.limit_draws = 5000;
  cfg.seed = kAcceptanceSeed;
  cfg.out_dir = "acceptance_out/rep_a";
  run_experiment(cfg, log);
  cfg.out_dir = "acceptance_out/rep_b";
  run_experiment(cfg, log);
  const bool repro = !slurp("acceptance_out/rep_a/argmax.csv").empty() &&
                     slurp("acceptance_out/rep_a/argmax.csv") ==
                         slurp("acceptance_out/rep_b/argmax.csv") &&
                     slurp("acceptance_out/rep_a/value.csv") ==
                         slurp("acceptance_out/rep_b/value.csv");
  std::ostringstream os;
  os << "invariants: sup_bound=" << (sup_ok ? "exact" : "VIOLATED")
     << " argmax_invariance=" << (inv_ok ? "exact" : "VIOLATED")
     << " csv_reproducibility=" << (repro ? "byte-identical" : "DIFFERS");
  report(9, sup_ok && inv_ok && repro, os.str(), t.seconds());
}

// --- criterion 10: sampler self-consistency noise floor --------------------

void criterion10() {
  Timer t;
  Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
  GaussianSpec spec(I2, I2, I2, I2, (Eigen::VectorXd(2) << 1.0, 0.0).finished());
  LimitSamplerConfig cfg;
  cfg.draws = 100000;
  auto a = sample_limit_argmax(spec, FullLine{}, mix64(kAcceptanceSeed), cfg);
  auto b = sample_limit_argmax(spec, FullLine{}, mix64(kAcceptanceSeed + 1), cfg);
  const double ks = ks_distance(EmpiricalDist(a.argmax), EmpiricalDist(b.argmax));
  std::ostringstream os;
  os << "self-consistency: ks(two 1e5-draw runs)=" << ks << " (tol 0.012)";
  report(10, ks <= 0.012, os.str(), t.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite, base seed %llu\n",
              static_cast<unsigned long long>(kAcceptanceSeed));
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("acceptance: %s\n", g_all_pass ? "ALL PASS" : "FAILURES");
  return g_all_pass ? 0 : 1;
}
