#ifndef SEGAUDIT_SEG_METRICS_HPP
#define SEGAUDIT_SEG_METRICS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "segaudit/mask_volume.hpp"

namespace segaudit {

// Per-case quality metrics for a silver (automated) mask against its gold
// (expert) mask. hd95_mm is empty exactly when one of the two masks is empty
// ("Missed"); both-empty scores dice 1.0 / hd95 0.0 by convention.
struct CaseMetrics {
  std::string case_id;
  double dice = 0.0;
  std::optional<double> hd95_mm;
  std::size_t gold_voxels = 0;
  std::size_t silver_voxels = 0;
};

// 2|A∩B| / (|A|+|B|); 1.0 when both masks are empty.
double dice(const MaskVolume& gold, const MaskVolume& silver);

// For each boundary voxel of a (ascending flat index), the Euclidean distance
// in mm to the nearest boundary voxel of b. EDT-accelerated: one distance
// field of b's boundary, sampled at a's boundary.
std::vector<double> surface_distances(const MaskVolume& a, const MaskVolume& b);

// max(P95(a→b), P95(b→a)) with the shared linear-interpolation percentile.
// 0.0 when both masks are empty; empty optional when exactly one is.
std::optional<double> hd95(const MaskVolume& gold, const MaskVolume& silver);

CaseMetrics compute_case_metrics(const std::string& case_id, const MaskVolume& gold,
                                 const MaskVolume& silver);

// CSV with header case_id,dice,hd95_mm,gold_voxels,silver_voxels; undefined
// hd95 serialized as NA. Rows in the order given.
std::string format_metrics_csv(const std::vector<CaseMetrics>& metrics);
std::vector<CaseMetrics> parse_metrics_csv(const std::string& text);

}  // namespace segaudit

#endif
