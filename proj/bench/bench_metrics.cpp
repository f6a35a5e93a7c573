// Benchmark: EDT-accelerated HD95 path vs the serial all-pairs reference,
// and EDT thread scaling. Build target only, not part of ctest.

#include <chrono>
#include <cstdio>
#include <functional>

#include "segaudit/edt.hpp"
#include "segaudit/reference.hpp"
#include "segaudit/seg_metrics.hpp"
#include "segaudit/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace segaudit;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto dt = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - t0);
  return dt.count() / reps;
}

MaskVolume phantom(int n, double rx, double ry, double rz, std::uint64_t) {
  EllipsoidSpec e;
  const double c = (n - 1) / 2.0;
  e.center_mm = {c, c, c};
  e.radii_mm = {rx, ry, rz};
  return rasterize_ellipsoid({n, n, n}, {1, 1, 1}, e);
}

}  // namespace

int main() {
  std::printf("%-10s %-10s %14s %14s %10s\n", "size", "boundary", "edt_hd95(ms)",
              "brute_hd95(ms)", "speedup");
  for (int n : {16, 24, 32, 48, 64}) {
    const double r = 0.38 * n;
    const auto gold = phantom(n, r, 0.8 * r, 0.9 * r, 1);
    const auto silver = phantom(n, 0.92 * r, 0.75 * r, 0.85 * r, 2);
    const int reps = n <= 32 ? 10 : 3;
    const double fast = time_ms([&] { (void)hd95(gold, silver); }, reps);
    const double brute = time_ms([&] { (void)reference::hd95(gold, silver); },
                                 n <= 32 ? 3 : 1);
    std::printf("%-10d %-10zu %14.2f %14.2f %9.1fx\n", n,
                boundary_voxels(gold).size(), fast, brute, brute / fast);
  }

#ifdef _OPENMP
  std::printf("\nEDT thread scaling (64^3 phantom):\n");
  const auto vol = phantom(64, 24, 20, 22, 3);
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    const double ms = time_ms([&] { (void)edt_sq(vol); }, 10);
    std::printf("  threads=%d  %8.2f ms\n", threads, ms);
  }
#endif
  return 0;
}
