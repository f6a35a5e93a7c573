#include "segaudit/edt.hpp"

#include <cmath>
#include <limits>

#include "segaudit/common.hpp"

namespace segaudit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D lower envelope of parabolas w2*(i-j)^2 + f[j] over finite f[j].
// Entries with f[j] = +inf never contribute. Writes the envelope into out;
// v/zb are caller-provided scratch (size n and n+1).
void parabolic_line(const std::vector<double>& f, std::vector<double>& out, int n,
                    double w2, std::vector<int>& v, std::vector<double>& zb) {
  int k = -1;
  for (int i = 0; i < n; ++i) {
    if (f[i] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = i;
      zb[0] = -kInf;
      zb[1] = kInf;
      continue;
    }
    double s;
    for (;;) {
      const int j = v[k];
      s = ((f[i] + w2 * static_cast<double>(i) * i) -
           (f[j] + w2 * static_cast<double>(j) * j)) /
          (2.0 * w2 * static_cast<double>(i - j));
      if (k > 0 && s <= zb[k]) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = i;
    zb[k] = s;
    zb[k + 1] = kInf;
  }
  if (k < 0) {  // whole line infinite
    for (int i = 0; i < n; ++i) out[i] = f[i];
    return;
  }
  int j = 0;
  for (int i = 0; i < n; ++i) {
    while (zb[j + 1] < static_cast<double>(i)) ++j;
    const double d = static_cast<double>(i - v[j]);
    out[i] = w2 * d * d + f[v[j]];
  }
}

}  // namespace

std::vector<double> edt_sq_from_seeds(const std::array<int, 3>& dims,
                                      const std::array<double, 3>& spacing,
                                      const std::vector<std::uint8_t>& seeds) {
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  const std::size_t total = static_cast<std::size_t>(nx) * ny * nz;
  if (seeds.size() != total)
    throw ValidationError("seed mask length does not match dims");

  bool any = false;
  for (std::uint8_t s : seeds)
    if (s) {
      any = true;
      break;
    }
  if (!any) throw ValidationError("empty seed set for distance transform");

  std::vector<double> field(total, kInf);
  const double sx = spacing[0];

  // Pass 1 (x): two-scan propagation on the 0/inf seed indicator. Distances
  // are (k*sx)^2 with integer step count k, so unit spacing stays exact.
  const std::size_t n_lines_x = static_cast<std::size_t>(ny) * nz;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t line = 0; line < static_cast<std::ptrdiff_t>(n_lines_x); ++line) {
    const int z = static_cast<int>(line / ny);
    const int y = static_cast<int>(line % ny);
    const std::size_t base = static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z);
    int last = -1;
    for (int x = 0; x < nx; ++x) {
      if (seeds[base + x]) {
        field[base + x] = 0.0;
        last = x;
      } else if (last >= 0) {
        const double d = static_cast<double>(x - last) * sx;
        field[base + x] = d * d;
      }
    }
    last = -1;
    for (int x = nx - 1; x >= 0; --x) {
      if (seeds[base + x]) {
        last = x;
      } else if (last >= 0) {
        const double d = static_cast<double>(last - x) * sx;
        const double dd = d * d;
        if (dd < field[base + x]) field[base + x] = dd;
      }
    }
  }

  // Pass 2 (y) and pass 3 (z): parabolic envelope per line, gather/scatter
  // through contiguous scratch. Each line is touched by exactly one thread.
  const double wy = spacing[1] * spacing[1];
  const std::size_t n_lines_y = static_cast<std::size_t>(nx) * nz;
#pragma omp parallel
  {
    std::vector<double> buf(static_cast<std::size_t>(ny));
    std::vector<double> env(static_cast<std::size_t>(ny));
    std::vector<int> v(static_cast<std::size_t>(ny));
    std::vector<double> zb(static_cast<std::size_t>(ny) + 1);
#pragma omp for schedule(static)
    for (std::ptrdiff_t line = 0; line < static_cast<std::ptrdiff_t>(n_lines_y); ++line) {
      const int z = static_cast<int>(line / nx);
      const int x = static_cast<int>(line % nx);
      const std::size_t base =
          static_cast<std::size_t>(x) +
          static_cast<std::size_t>(nx) * ny * static_cast<std::size_t>(z);
      const std::size_t stride = static_cast<std::size_t>(nx);
      for (int y = 0; y < ny; ++y) buf[y] = field[base + stride * y];
      parabolic_line(buf, env, ny, wy, v, zb);
      for (int y = 0; y < ny; ++y) field[base + stride * y] = env[y];
    }
  }

  const double wz = spacing[2] * spacing[2];
  const std::size_t n_lines_z = static_cast<std::size_t>(nx) * ny;
#pragma omp parallel
  {
    std::vector<double> buf(static_cast<std::size_t>(nz));
    std::vector<double> env(static_cast<std::size_t>(nz));
    std::vector<int> v(static_cast<std::size_t>(nz));
    std::vector<double> zb(static_cast<std::size_t>(nz) + 1);
#pragma omp for schedule(static)
    for (std::ptrdiff_t line = 0; line < static_cast<std::ptrdiff_t>(n_lines_z); ++line) {
      const std::size_t base = static_cast<std::size_t>(line);
      const std::size_t stride = static_cast<std::size_t>(nx) * ny;
      for (int z = 0; z < nz; ++z) buf[z] = field[base + stride * z];
      parabolic_line(buf, env, nz, wz, v, zb);
      for (int z = 0; z < nz; ++z) field[base + stride * z] = env[z];
    }
  }

  return field;
}

std::vector<double> edt_sq(const MaskVolume& vol) {
  std::vector<std::uint8_t> seeds(vol.size(), 0);
  const auto boundary = boundary_voxels(vol);
  if (boundary.empty())
    throw ValidationError("empty boundary set: volume has no foreground voxels");
  for (const auto& b : boundary) seeds[vol.flat(b.x, b.y, b.z)] = 1;
  return edt_sq_from_seeds(vol.dims(), vol.spacing(), seeds);
}

}  // namespace segaudit
