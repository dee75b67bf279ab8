#pragma once

#include <vector>

namespace argmaxlab {

// Sorted Monte Carlo sample with ECDF queries.
class EmpiricalDist {
 public:
  explicit EmpiricalDist(std::vector<double> samples);

  std::size_t n() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }

  // Right-continuous ECDF: F(x) = #{s_i <= x} / n.
  double ecdf(double x) const;

  // Order-statistic quantile, q in [0, 1].
  double quantile(double q) const;

  EmpiricalDist negated() const;

 private:
  std::vector<double> samples_;
};

// Exact sup-norm distance between two ECDFs (merged order-statistics sweep).
double ks_distance(const EmpiricalDist& a, const EmpiricalDist& b);

}  // namespace argmaxlab
