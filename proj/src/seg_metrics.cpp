#include "segaudit/seg_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "segaudit/common.hpp"
#include "segaudit/csv.hpp"
#include "segaudit/edt.hpp"
#include "segaudit/numfmt.hpp"
#include "segaudit/quantile.hpp"

namespace segaudit {

double dice(const MaskVolume& gold, const MaskVolume& silver) {
  if (gold.dims() != silver.dims())
    throw ValidationError("dice: volume dims mismatch");
  std::size_t inter = 0, na = 0, nb = 0;
  const auto& a = gold.data();
  const auto& b = silver.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]);
    na += (a[i] != 0);
    nb += (b[i] != 0);
  }
  if (na + nb == 0) return 1.0;  // agreement on absence
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

std::vector<double> surface_distances(const MaskVolume& a, const MaskVolume& b) {
  if (a.dims() != b.dims() || a.spacing() != b.spacing())
    throw ValidationError("surface_distances: volume dims/spacing mismatch");
  const auto boundary_a = boundary_voxels(a);
  if (boundary_a.empty())
    throw ValidationError("surface_distances: first mask is empty");
  const auto field_b = edt_sq(b);  // errors if b is empty

  std::vector<double> out(boundary_a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(boundary_a.size()); ++i) {
    const auto& p = boundary_a[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = std::sqrt(field_b[a.flat(p.x, p.y, p.z)]);
  }
  return out;
}

std::optional<double> hd95(const MaskVolume& gold, const MaskVolume& silver) {
  if (gold.dims() != silver.dims() || gold.spacing() != silver.spacing())
    throw ValidationError("hd95: volume dims/spacing mismatch");
  const bool gold_empty = gold.empty_mask();
  const bool silver_empty = silver.empty_mask();
  if (gold_empty && silver_empty) return 0.0;
  if (gold_empty != silver_empty) return std::nullopt;  // "Missed"

  auto forward = surface_distances(gold, silver);
  auto backward = surface_distances(silver, gold);
  std::sort(forward.begin(), forward.end());
  std::sort(backward.begin(), backward.end());
  return std::max(quantile_sorted(forward, 0.95), quantile_sorted(backward, 0.95));
}

CaseMetrics compute_case_metrics(const std::string& case_id, const MaskVolume& gold,
                                 const MaskVolume& silver) {
  CaseMetrics m;
  m.case_id = case_id;
  m.dice = dice(gold, silver);
  m.hd95_mm = hd95(gold, silver);
  m.gold_voxels = gold.foreground_count();
  m.silver_voxels = silver.foreground_count();
  return m;
}

std::string format_metrics_csv(const std::vector<CaseMetrics>& metrics) {
  CsvTable t;
  t.header = {"case_id", "dice", "hd95_mm", "gold_voxels", "silver_voxels"};
  for (const auto& m : metrics) {
    t.rows.push_back({m.case_id, format_double(m.dice),
                      m.hd95_mm ? format_double(*m.hd95_mm) : "NA",
                      std::to_string(m.gold_voxels), std::to_string(m.silver_voxels)});
  }
  return format_csv(t);
}

std::vector<CaseMetrics> parse_metrics_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  const std::vector<std::string> expect = {"case_id", "dice", "hd95_mm",
                                           "gold_voxels", "silver_voxels"};
  if (t.header != expect)
    throw ValidationError("metrics csv header must be case_id,dice,hd95_mm,gold_voxels,silver_voxels");
  std::vector<CaseMetrics> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    CaseMetrics m;
    m.case_id = row[0];
    try {
      m.dice = std::stod(row[1]);
      if (row[2] != "NA") m.hd95_mm = std::stod(row[2]);
      m.gold_voxels = static_cast<std::size_t>(std::stoull(row[3]));
      m.silver_voxels = static_cast<std::size_t>(std::stoull(row[4]));
    } catch (const std::exception&) {
      throw ValidationError("metrics csv: unparsable numeric field for case " + m.case_id);
    }
    if (!(m.dice >= 0.0 && m.dice <= 1.0))
      throw ValidationError("metrics csv: dice out of [0,1] for case " + m.case_id);
    if (m.hd95_mm && !(*m.hd95_mm >= 0.0))
      throw ValidationError("metrics csv: negative hd95 for case " + m.case_id);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace segaudit
