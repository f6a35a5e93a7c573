#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "segaudit/common.hpp"
#include "segaudit/edt.hpp"
#include "segaudit/reference.hpp"
#include "support.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace segaudit;

TEST_CASE("edt_sq is zero exactly at boundary voxels") {
  const auto vol = testing::random_nonempty_mask({10, 9, 8}, 0.3, 41);
  const auto field = edt_sq(vol);
  for (const auto& b : boundary_voxels(vol))
    CHECK(field[vol.flat(b.x, b.y, b.z)] == 0.0);
}

TEST_CASE("edt_sq closed form on a 1D line: k^2 at distance k") {
  std::vector<std::uint8_t> data(16, 0);
  data[0] = 1;
  MaskVolume vol({16, 1, 1}, {1, 1, 1}, std::move(data));
  const auto field = edt_sq(vol);
  for (int k = 0; k < 16; ++k)
    CHECK(field[static_cast<std::size_t>(k)] == static_cast<double>(k) * k);
}

TEST_CASE("edt_sq equals brute force exactly for unit spacing (random 20^3)") {
  for (int rep = 0; rep < 10; ++rep) {
    const auto vol =
        testing::random_nonempty_mask({20, 20, 20}, 0.02 + 0.05 * rep, mix_seed(99, rep));
    const auto fast = edt_sq(vol);
    const auto ref = reference::edt_sq(vol);
    REQUIRE(fast.size() == ref.size());
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == ref[i]);
  }
}

TEST_CASE("edt_sq matches brute force within 1e-9 for anisotropic spacing") {
  const std::array<double, 3> spacings[] = {
      {0.5, 2.0, 1.25}, {0.7, 1.3, 2.9}, {3.0, 0.25, 1.0}};
  int rep = 0;
  for (const auto& sp : spacings) {
    const auto vol =
        testing::random_nonempty_mask({14, 15, 13}, 0.12, mix_seed(1234, rep++), sp);
    const auto fast = edt_sq(vol);
    const auto ref = reference::edt_sq(vol);
    for (std::size_t i = 0; i < fast.size(); ++i)
      CHECK(std::fabs(fast[i] - ref[i]) <= 1e-9);
  }
}

TEST_CASE("edt_sq on degenerate 1-thick and 2D-ish volumes") {
  const auto flat = testing::random_nonempty_mask({17, 11, 1}, 0.2, 7);
  const auto fast = edt_sq(flat);
  const auto ref = reference::edt_sq(flat);
  for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == ref[i]);
}

TEST_CASE("edt_sq rejects an empty seed set") {
  MaskVolume vol({4, 4, 4}, {1, 1, 1}, std::vector<std::uint8_t>(64, 0));
  CHECK_THROWS_WITH_AS(edt_sq(vol), doctest::Contains("empty boundary"), ValidationError);
}

#ifdef _OPENMP
TEST_CASE("edt_sq output is bit-identical across thread counts") {
  const auto vol = testing::random_nonempty_mask({24, 23, 22}, 0.1, 2026);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = edt_sq(vol);
  omp_set_num_threads(4);
  const auto four = edt_sq(vol);
  omp_set_num_threads(saved);
  CHECK(one == four);
}
#endif
