#ifndef SEGAUDIT_TESTS_SUPPORT_HPP
#define SEGAUDIT_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "segaudit/mask_volume.hpp"
#include "segaudit/rng.hpp"
#include "segaudit/stats/special.hpp"
#include "segaudit/stats/tests.hpp"

namespace segaudit::testing {

inline MaskVolume random_mask(std::array<int, 3> dims, double fill_prob,
                              std::uint64_t seed,
                              std::array<double, 3> spacing = {1.0, 1.0, 1.0}) {
  Rng rng(seed);
  std::vector<std::uint8_t> data(
      static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], 0);
  for (auto& v : data) v = rng.next_double() < fill_prob ? 1 : 0;
  return MaskVolume(dims, spacing, std::move(data));
}

// Guaranteed non-empty: one seeded voxel forced on.
inline MaskVolume random_nonempty_mask(std::array<int, 3> dims, double fill_prob,
                                       std::uint64_t seed,
                                       std::array<double, 3> spacing = {1.0, 1.0, 1.0}) {
  auto vol = random_mask(dims, fill_prob, seed, spacing);
  if (vol.empty_mask()) {
    Rng rng(mix_seed(seed, 999));
    std::vector<std::uint8_t> data = vol.data();
    data[static_cast<std::size_t>(rng.next_below(data.size()))] = 1;
    return MaskVolume(dims, spacing, std::move(data));
  }
  return vol;
}

// Adaptive Simpson quadrature, absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 30) {
  const double c = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fc = f(c);
  std::function<double(double, double, double, double, double, double, double, int)>
      recurse = [&](double lo, double hi, double flo, double fhi, double fmid,
                    double whole, double eps, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double flm = f(lmid), frm = f(rmid);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return recurse(lo, mid, flo, fmid, flm, left, eps / 2.0, d - 1) +
           recurse(mid, hi, fmid, fhi, frm, right, eps / 2.0, d - 1);
  };
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
  return recurse(a, b, fa, fb, fc, whole, tol, depth);
}

inline std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    double u = rng.next_double();
    while (u <= 0.0 || u >= 1.0) u = rng.next_double();
    v = stats::inverse_normal_cdf(u);
  }
  return out;
}

inline std::vector<double> exponential_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = -std::log(1.0 - rng.next_double());
  return out;
}

// Permutation estimate of the Kruskal-Wallis upper-tail p, shuffling group
// labels of the pooled sample.
inline double kw_permutation_p(const std::vector<std::vector<double>>& groups,
                               int n_perm, std::uint64_t seed) {
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    sizes.push_back(g.size());
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const double h_obs = stats::kruskal_wallis(groups).statistic;
  Rng rng(seed);
  int hits = 0;
  std::vector<double> work = pooled;
  for (int p = 0; p < n_perm; ++p) {
    for (std::size_t i = work.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
      std::swap(work[i], work[j]);
    }
    std::vector<std::vector<double>> perm;
    std::size_t off = 0;
    for (auto s : sizes) {
      perm.emplace_back(work.begin() + off, work.begin() + off + s);
      off += s;
    }
    if (stats::kruskal_wallis(perm).statistic >= h_obs - 1e-12) ++hits;
  }
  return static_cast<double>(hits) / n_perm;
}

// Permutation estimate of the two-sided Mann-Whitney p via |U - nm/2|.
inline double mwu_permutation_p(const std::vector<double>& x,
                                const std::vector<double>& y, int n_perm,
                                std::uint64_t seed) {
  const double center = static_cast<double>(x.size()) * y.size() / 2.0;
  const double dev_obs = std::fabs(stats::mann_whitney_u(x, y).statistic - center);
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  Rng rng(seed);
  int hits = 0;
  for (int p = 0; p < n_perm; ++p) {
    for (std::size_t i = pooled.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
      std::swap(pooled[i], pooled[j]);
    }
    const std::vector<double> px(pooled.begin(), pooled.begin() + x.size());
    const std::vector<double> py(pooled.begin() + x.size(), pooled.end());
    if (std::fabs(stats::mann_whitney_u(px, py).statistic - center) >= dev_obs - 1e-12)
      ++hits;
  }
  return static_cast<double>(hits) / n_perm;
}

}  // namespace segaudit::testing

#endif
