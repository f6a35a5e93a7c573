#include "segaudit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segaudit/common.hpp"
#include "segaudit/quantile.hpp"

namespace segaudit::reference {

std::vector<Voxel> boundary_voxels(const MaskVolume& vol) {
  const auto [nx, ny, nz] = vol.dims();
  std::vector<Voxel> out;
  const int off[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                         {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (!vol.at(x, y, z)) continue;
        int exposed = 0;
        for (const auto& o : off)
          if (!vol.foreground(x + o[0], y + o[1], z + o[2])) ++exposed;
        if (exposed > 0) out.push_back({x, y, z});
      }
  return out;
}

std::vector<double> edt_sq(const MaskVolume& vol) {
  const auto seeds = reference::boundary_voxels(vol);
  if (seeds.empty()) throw ValidationError("empty boundary set");
  const auto [nx, ny, nz] = vol.dims();
  const auto [sx, sy, sz] = vol.spacing();
  std::vector<double> field(vol.size());
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : seeds) {
          const double dx = static_cast<double>(x - s.x) * sx;
          const double dy = static_cast<double>(y - s.y) * sy;
          const double dz = static_cast<double>(z - s.z) * sz;
          const double d = dx * dx + dy * dy + dz * dz;
          if (d < best) best = d;
        }
        field[vol.flat(x, y, z)] = best;
      }
  return field;
}

std::vector<double> surface_distances(const MaskVolume& a, const MaskVolume& b) {
  if (a.dims() != b.dims() || a.spacing() != b.spacing())
    throw ValidationError("volume dims/spacing mismatch");
  const auto ba = reference::boundary_voxels(a);
  const auto bb = reference::boundary_voxels(b);
  if (ba.empty() || bb.empty()) throw ValidationError("empty mask");
  const auto [sx, sy, sz] = a.spacing();
  std::vector<double> out;
  out.reserve(ba.size());
  for (const auto& p : ba) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : bb) {
      const double dx = static_cast<double>(p.x - q.x) * sx;
      const double dy = static_cast<double>(p.y - q.y) * sy;
      const double dz = static_cast<double>(p.z - q.z) * sz;
      const double d = dx * dx + dy * dy + dz * dz;
      if (d < best) best = d;
    }
    out.push_back(std::sqrt(best));
  }
  return out;
}

std::optional<double> hd95(const MaskVolume& gold, const MaskVolume& silver) {
  if (gold.dims() != silver.dims() || gold.spacing() != silver.spacing())
    throw ValidationError("volume dims/spacing mismatch");
  const bool ge = gold.empty_mask();
  const bool se = silver.empty_mask();
  if (ge && se) return 0.0;
  if (ge != se) return std::nullopt;
  auto d_ab = surface_distances(gold, silver);
  auto d_ba = surface_distances(silver, gold);
  std::sort(d_ab.begin(), d_ab.end());
  std::sort(d_ba.begin(), d_ba.end());
  return std::max(quantile_sorted(d_ab, 0.95), quantile_sorted(d_ba, 0.95));
}

double dice(const MaskVolume& gold, const MaskVolume& silver) {
  if (gold.dims() != silver.dims()) throw ValidationError("volume dims mismatch");
  std::size_t inter = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool a = gold.data()[i] != 0;
    const bool b = silver.data()[i] != 0;
    inter += (a && b);
    na += a;
    nb += b;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

}  // namespace segaudit::reference
