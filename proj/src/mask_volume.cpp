#include "segaudit/mask_volume.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "segaudit/common.hpp"

namespace fs = std::filesystem;

namespace segaudit {

MaskVolume::MaskVolume(std::array<int, 3> dims, std::array<double, 3> spacing,
                       std::vector<std::uint8_t> data)
    : dims_(dims), spacing_(spacing), data_(std::move(data)) {
  for (int d : dims_)
    if (d < 1) throw ValidationError("mask dims must be >= 1");
  for (double s : spacing_)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ValidationError("mask spacing must be positive and finite");
  const std::size_t expect = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  if (data_.size() != expect)
    throw ValidationError("mask data length " + std::to_string(data_.size()) +
                          " does not match dims product " + std::to_string(expect));
}

std::size_t MaskVolume::foreground_count() const {
  std::size_t n = 0;
  for (std::uint8_t v : data_) n += (v != 0);
  return n;
}

namespace {

// Header keys, fixed order, case-sensitive.
constexpr const char* kKeys[6] = {"ObjectType", "NDims",       "DimSize",
                                  "ElementSpacing", "ElementType", "ElementDataFile"};

std::pair<std::string, std::string> parse_header_line(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos)
    throw ValidationError("malformed header line (no '='): " + line);
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, e - b + 1);
  };
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace

MaskVolume read_mask(const std::string& header_path) {
  std::ifstream in(header_path);
  if (!in) throw IoError("cannot open mask header: " + header_path);

  std::string values[6];
  std::string line;
  int key_idx = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto [key, value] = parse_header_line(line);
    if (key_idx >= 6)
      throw ValidationError("unexpected extra header key '" + key + "' in " + header_path);
    if (key != kKeys[key_idx])
      throw ValidationError("header key #" + std::to_string(key_idx + 1) + " is '" +
                            key + "', expected '" + kKeys[key_idx] + "' in " +
                            header_path);
    values[key_idx++] = value;
  }
  if (key_idx != 6)
    throw ValidationError("header has " + std::to_string(key_idx) +
                          " keys, expected 6: " + header_path);
  if (values[0] != "Image")
    throw ValidationError("ObjectType must be Image: " + header_path);
  if (values[1] != "3") throw ValidationError("NDims must be 3: " + header_path);
  if (values[4] != "MET_UCHAR")
    throw ValidationError("ElementType must be MET_UCHAR: " + header_path);

  std::array<int, 3> dims{};
  {
    std::istringstream ss(values[2]);
    if (!(ss >> dims[0] >> dims[1] >> dims[2]))
      throw ValidationError("malformed DimSize '" + values[2] + "' in " + header_path);
  }
  std::array<double, 3> spacing{};
  {
    std::istringstream ss(values[3]);
    if (!(ss >> spacing[0] >> spacing[1] >> spacing[2]))
      throw ValidationError("malformed ElementSpacing '" + values[3] + "' in " +
                            header_path);
  }
  for (double s : spacing)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ValidationError("non-positive spacing in " + header_path);

  const fs::path raw_path = fs::path(header_path).parent_path() / values[5];
  std::ifstream raw(raw_path, std::ios::binary);
  if (!raw) throw IoError("cannot open raw payload: " + raw_path.string());
  std::vector<std::uint8_t> payload((std::istreambuf_iterator<char>(raw)),
                                    std::istreambuf_iterator<char>());
  const std::size_t expect =
      static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  if (payload.size() != expect)
    throw ValidationError("payload length mismatch: " + raw_path.string() + " has " +
                          std::to_string(payload.size()) + " bytes, expected " +
                          std::to_string(expect));
  for (auto& b : payload) b = (b > 0) ? 1 : 0;
  return MaskVolume(dims, spacing, std::move(payload));
}

void write_mask(const MaskVolume& vol, const std::string& header_path) {
  fs::path hp(header_path);
  fs::path raw_path = hp;
  raw_path.replace_extension(".raw");

  std::ofstream raw(raw_path, std::ios::binary);
  if (!raw) throw IoError("cannot open raw file for writing: " + raw_path.string());
  std::vector<std::uint8_t> payload(vol.data());
  for (auto& b : payload) b = b ? 1 : 0;
  raw.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!raw) throw IoError("write failed: " + raw_path.string());
  raw.close();

  char spacing_buf[96];
  std::snprintf(spacing_buf, sizeof(spacing_buf), "%.17g %.17g %.17g",
                vol.spacing()[0], vol.spacing()[1], vol.spacing()[2]);

  std::ofstream hdr(hp);
  if (!hdr) throw IoError("cannot open header for writing: " + header_path);
  hdr << "ObjectType = Image\n"
      << "NDims = 3\n"
      << "DimSize = " << vol.dims()[0] << ' ' << vol.dims()[1] << ' '
      << vol.dims()[2] << '\n'
      << "ElementSpacing = " << spacing_buf << '\n'
      << "ElementType = MET_UCHAR\n"
      << "ElementDataFile = " << raw_path.filename().string() << '\n';
  if (!hdr) throw IoError("write failed: " + header_path);
}

std::vector<Voxel> boundary_voxels(const MaskVolume& vol) {
  std::vector<Voxel> out;
  const auto [nx, ny, nz] = vol.dims();
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (!vol.at(x, y, z)) continue;
        const bool surface = !vol.foreground(x - 1, y, z) || !vol.foreground(x + 1, y, z) ||
                             !vol.foreground(x, y - 1, z) || !vol.foreground(x, y + 1, z) ||
                             !vol.foreground(x, y, z - 1) || !vol.foreground(x, y, z + 1);
        if (surface) out.push_back({x, y, z});
      }
  return out;
}

}  // namespace segaudit
