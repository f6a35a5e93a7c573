#ifndef SEGAUDIT_MASK_VOLUME_HPP
#define SEGAUDIT_MASK_VOLUME_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace segaudit {

struct Voxel {
  int x, y, z;
  bool operator==(const Voxel&) const = default;
};

// 3D binary voxel grid with anisotropic spacing (mm per voxel along each
// axis). Flat data is x-fastest: index = x + nx*(y + ny*z). Immutable after
// construction and safe to share across threads.
class MaskVolume {
 public:
  // Minimal valid volume: a single background voxel at unit spacing.
  MaskVolume() : dims_{1, 1, 1}, spacing_{1.0, 1.0, 1.0}, data_(1, 0) {}
  MaskVolume(std::array<int, 3> dims, std::array<double, 3> spacing,
             std::vector<std::uint8_t> data);

  const std::array<int, 3>& dims() const { return dims_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  std::size_t size() const { return data_.size(); }
  std::size_t flat(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(z));
  }
  bool at(int x, int y, int z) const { return data_[flat(x, y, z)] != 0; }

  // Inside the grid and foreground; out-of-grid coordinates count as
  // background (a mask touching the field-of-view edge has a surface there).
  bool foreground(int x, int y, int z) const {
    if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2])
      return false;
    return at(x, y, z);
  }

  std::size_t foreground_count() const;
  bool empty_mask() const { return foreground_count() == 0; }

 private:
  std::array<int, 3> dims_;
  std::array<double, 3> spacing_;
  std::vector<std::uint8_t> data_;
};

// Reads the two-file MetaImage-style format (ASCII header + raw payload).
// Strict: the six keys must appear in fixed order, unknown keys are errors,
// payload length must be exactly nx*ny*nz. Any payload byte > 0 is foreground.
MaskVolume read_mask(const std::string& header_path);

// Writes header + raw payload readable by read_mask. Foreground encodes as
// byte 1, background as 0. The raw file sits next to the header with the
// same stem and a .raw suffix.
void write_mask(const MaskVolume& vol, const std::string& header_path);

// Foreground voxels with at least one 6-neighbor that is background or
// outside the grid, ascending by flat index.
std::vector<Voxel> boundary_voxels(const MaskVolume& vol);

}  // namespace segaudit

#endif
