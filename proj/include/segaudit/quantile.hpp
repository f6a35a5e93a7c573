#ifndef SEGAUDIT_QUANTILE_HPP
#define SEGAUDIT_QUANTILE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "segaudit/common.hpp"

namespace segaudit {

// Linear interpolation between order statistics: h = (n-1)*p,
// q = x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]).
// The one percentile rule used everywhere (HD95 and the top-quartile
// threshold share it).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of empty sample");
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

}  // namespace segaudit

#endif
