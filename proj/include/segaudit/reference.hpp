#ifndef SEGAUDIT_REFERENCE_HPP
#define SEGAUDIT_REFERENCE_HPP

#include <optional>
#include <vector>

#include "segaudit/mask_volume.hpp"

// Serial brute-force counterparts of the fast kernels. Deliberately written
// from the definitions, with no shared code path: tests compare the two
// routes, and the benchmark measures the gap. Not linked into the CLI.
namespace segaudit::reference {

// O(n*6) neighbor re-scan.
std::vector<Voxel> boundary_voxels(const MaskVolume& vol);

// O(N * |B|) nearest-boundary scan; squared mm.
std::vector<double> edt_sq(const MaskVolume& vol);

// O(|A| * |B|) all-pairs minima over boundary voxels; mm.
std::vector<double> surface_distances(const MaskVolume& a, const MaskVolume& b);

// Same quantile rule as the fast path, over brute-force distances.
std::optional<double> hd95(const MaskVolume& gold, const MaskVolume& silver);

double dice(const MaskVolume& gold, const MaskVolume& silver);

}  // namespace segaudit::reference

#endif
