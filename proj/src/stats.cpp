#include "argmaxlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace argmaxlab {

EmpiricalDist::EmpiricalDist(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("EmpiricalDist: empty sample");
  for (double v : samples_) {
    if (std::isnan(v)) throw std::invalid_argument("EmpiricalDist: NaN sample");
  }
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDist::ecdf(double x) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalDist::quantile(double q) const {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q must be in [0, 1]");
  if (q == 0.0) return samples_.front();
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(samples_.size())));
  return samples_[std::min(samples_.size(), std::max<std::size_t>(k, 1)) - 1];
}

EmpiricalDist EmpiricalDist::negated() const {
  std::vector<double> neg(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) neg[i] = -samples_[i];
  return EmpiricalDist(std::move(neg));
}

double ks_distance(const EmpiricalDist& a, const EmpiricalDist& b) {
  const auto& xs = a.samples();
  const auto& ys = b.samples();
  const double na = static_cast<double>(xs.size());
  const double nb = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() || j < ys.size()) {
    double v;
    if (j >= ys.size() || (i < xs.size() && xs[i] <= ys[j])) {
      v = xs[i];
    } else {
      v = ys[j];
    }
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace argmaxlab
