#ifndef SEGAUDIT_EDT_HPP
#define SEGAUDIT_EDT_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "segaudit/mask_volume.hpp"

namespace segaudit {

// Exact squared Euclidean distance (mm^2) from every voxel to the nearest
// set seed voxel, honoring anisotropic spacing. Separable: a two-scan
// propagation along x, then a parabolic lower-envelope pass along y and z
// (Felzenszwalb & Huttenlocher in 1D, applied axis by axis). O(N) per axis.
// Lines are independent, so the passes parallelize over lines with OpenMP;
// output is bit-identical for any thread count.
std::vector<double> edt_sq_from_seeds(const std::array<int, 3>& dims,
                                      const std::array<double, 3>& spacing,
                                      const std::vector<std::uint8_t>& seeds);

// Squared distance field to the nearest boundary voxel of vol.
// Errors if the boundary set is empty (all-background volume).
std::vector<double> edt_sq(const MaskVolume& vol);

}  // namespace segaudit

#endif
