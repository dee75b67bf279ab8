#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace argmaxlab {

inline constexpr double kFeasTol = 1e-9;

// Finite point cloud in R^d.  Points are stored row-major, sorted
// lexicographically, with exact duplicates removed after rounding every
// coordinate to 12 significant digits.  May be empty.
class GridSet {
 public:
  GridSet(int dim, std::vector<double> flat_points);
  static GridSet empty(int dim) { return GridSet(dim, {}); }
  static GridSet from_1d(std::vector<double> xs) { return GridSet(1, std::move(xs)); }

  int dim() const { return dim_; }
  std::size_t size() const { return pts_.size() / static_cast<std::size_t>(dim_); }
  bool is_empty() const { return pts_.empty(); }
  const std::vector<double>& data() const { return pts_; }
  Eigen::Map<const Eigen::VectorXd> point(std::size_t i) const {
    return {pts_.data() + i * static_cast<std::size_t>(dim_), dim_};
  }

 private:
  int dim_;
  std::vector<double> pts_;
};

// {lambda in R^d : b + G lambda <= 0}.  Entries of b lie in [-inf, 0];
// rows with b_j = -inf are flagged inactive and never enter arithmetic.
// Since b <= 0, the origin is always feasible.
class PolyhedralSet {
 public:
  PolyhedralSet(Eigen::MatrixXd G, Eigen::VectorXd b);

  int dim() const { return static_cast<int>(G_.cols()); }
  int num_rows() const { return static_cast<int>(G_.rows()); }
  const Eigen::MatrixXd& G() const { return G_; }
  const Eigen::VectorXd& b() const { return b_; }
  bool row_active(int j) const { return active_[static_cast<std::size_t>(j)]; }
  int num_active() const;

  // Active rows only, as  A lambda <= u  with u = -b.
  Eigen::MatrixXd active_G() const;
  Eigen::VectorXd active_b() const;

  bool contains(const Eigen::VectorXd& x, double tol = kFeasTol) const;

 private:
  Eigen::MatrixXd G_;
  Eigen::VectorXd b_;
  std::vector<bool> active_;
};

using SetValue = std::variant<GridSet, PolyhedralSet>;

// Axis-aligned bounding box used as the compact K in PK computations.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Eigen::VectorXd& x, double tol = kFeasTol) const;
};

// n |-> subset of R^d, with an optional affine rescaling s_n (x - c_n)
// applied pointwise to the raw set.
class SetSequence {
 public:
  using Family = std::function<SetValue(long long)>;
  using CenterRule = std::function<Eigen::VectorXd(long long)>;
  using ScaleRule = std::function<double(long long)>;

  explicit SetSequence(Family family, std::string description = "");
  SetSequence(Family family, CenterRule center, ScaleRule scale,
              std::string description = "");

  SetValue at(long long n) const;          // scaled
  SetValue raw(long long n) const { return family_(n); }
  const std::string& description() const { return description_; }

 private:
  Family family_;
  CenterRule center_;
  ScaleRule scale_;
  std::string description_;
};

int set_dim(const SetValue& s);
bool set_is_empty(const SetValue& s);

// inf_{g in S} ||h - g||.  +inf for empty S.  Polyhedral sets are handled
// by Euclidean projection (a QP).  Throws on dimension mismatch.
double point_to_set_distance(const Eigen::VectorXd& h, const SetValue& s);
double point_to_set_distance(const Eigen::VectorXd& h, const GridSet& s);
double point_to_set_distance(const Eigen::VectorXd& h, const PolyhedralSet& s);

// Euclidean projection of h onto a (nonempty) polyhedral set.
Eigen::VectorXd polyhedral_project(const Eigen::VectorXd& h, const PolyhedralSet& s);

// sup_{a in A} d(a, B).  0 when A is empty; +inf when B is empty and A is not.
double directed_distance(const GridSet& a, const SetValue& b);

struct PkDiagnostics {
  std::vector<long long> schedule;
  std::vector<double> limit_to_seq;  // d->(est cap K, Lambda_n)
  std::vector<double> seq_to_limit;  // d->(Lambda_n cap K, est)
  bool converged = false;
};

struct PkOptions {
  // Final directed distances must fall below this for the converged flag;
  // <= 0 means use 2 * grid_step.
  double convergence_tol = 0.0;
  // Slack allowed when checking that diagnostics decrease along the
  // schedule; <= 0 means use grid_step (distances are quantized at that
  // resolution, so sub-step fluctuations are noise).
  double monotone_slack = 0.0;
};

struct PkEstimate {
  GridSet limit;
  PkDiagnostics diagnostics;
};

// Numeric proxy for the PK limit of seq over the compact box K: a grid
// point h belongs to the estimate when its distance to the sets at the last
// two schedule indices stays below 2 * grid_step.
PkEstimate pk_limit_estimate(const SetSequence& seq, const Box& K,
                             const std::vector<long long>& n_schedule,
                             double grid_step, const PkOptions& opts = {});

// v_T^2 (Lambda_T - k0) with Lambda_T = {floor(l1 T), ..., floor(l2 T)}.
GridSet rescaled_break_set(long long T, long long k0, double vT, double lambda1,
                           double lambda2);

// {lambda : b + G lambda <= 0} with -inf rows dropped.  b entries in [-inf, 0].
PolyhedralSet linearized_boundary_set(const Eigen::VectorXd& b, const Eigen::MatrixXd& G);

struct MfcqResult {
  bool holds = false;
  Eigen::VectorXd witness;
  double slack = 0.0;  // min over active rows of -(b + G witness)
};

// Mangasarian-Fromowitz check: is there a point with strictly negative slack
// in every active row?  Decided by maximizing the minimum slack over the
// unit box (lossless for b <= 0 since strict feasibility is preserved under
// shrinking toward the origin).
MfcqResult mfcq_check(const PolyhedralSet& p, double tol = 1e-7);

// Limit sets for the weak-identification rescalings of the toy model.
// theta = (beta, pi) with constraints b0 + A_beta beta + A_pi pi <= 0.
struct WeakIdLimitSets {
  PolyhedralSet b_weak;        // B^W = {beta : (beta, pi0) in Theta}, beta coords
  PolyhedralSet b_semistrong;  // B^SS = {lambda : b + G_beta lambda <= 0}
  bool product_with_pi_space = true;  // both limits are (set) x R^{d_pi}
  bool mfcq_ok = true;                // Lemma hypothesis for B^SS
  std::string warning;
};

WeakIdLimitSets weakid_limit_sets(const Eigen::VectorXd& b0,
                                  const Eigen::MatrixXd& A_beta,
                                  const Eigen::MatrixXd& A_pi,
                                  const Eigen::VectorXd& pi0,
                                  const Eigen::VectorXd& drift_b,
                                  const Eigen::MatrixXd& G_beta);

}  // namespace argmaxlab
