#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace radpipe {

// Axis order is (z, y, x) everywhere: voxels are stored z-major with x
// fastest, matching the on-disk raw layout.

struct CtVolume {
  std::array<int, 3> dims{0, 0, 0};            // nz, ny, nx
  std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm per voxel, (sz, sy, sx)
  std::vector<int16_t> voxels;                 // Hounsfield Units

  size_t size() const { return voxels.size(); }
  int16_t at(int z, int y, int x) const {
    return voxels[(static_cast<size_t>(z) * dims[1] + y) * dims[2] + x];
  }
  int16_t& at(int z, int y, int x) {
    return voxels[(static_cast<size_t>(z) * dims[1] + y) * dims[2] + x];
  }
};

struct GrayVolume {
  std::array<int, 3> dims{0, 0, 0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::vector<uint8_t> voxels;  // gray levels 0..255

  size_t size() const { return voxels.size(); }
  uint8_t at(int z, int y, int x) const {
    return voxels[(static_cast<size_t>(z) * dims[1] + y) * dims[2] + x];
  }
  uint8_t& at(int z, int y, int x) {
    return voxels[(static_cast<size_t>(z) * dims[1] + y) * dims[2] + x];
  }
};

// Linear display window: HU in [center - width/2, center + width/2] maps to
// gray [0, 255]. Default is abdominal soft tissue.
struct Window {
  double center = 40.0;
  double width = 400.0;
};

// Volume container format: a UTF-8 header file with `key = value` lines
//   dims = nz ny nx
//   spacing = sz sy sx
//   dtype = int16-le | uint8
//   data = <raw filename relative to the header>
// and a raw file holding voxels z-major, y next, x fastest.
CtVolume read_volume(const std::string& header_path);
void write_volume(const CtVolume& vol, const std::string& header_path);

GrayVolume read_gray_volume(const std::string& header_path);
void write_gray_volume(const GrayVolume& vol, const std::string& header_path);

GrayVolume hu_to_gray(const CtVolume& vol, const Window& window);

// Trilinear resample to cubic voxels of `target_mm`. Output dim per axis is
// round(dim * spacing / target), at least 1; samples are taken at aligned
// voxel centers with edge clamping and rounded to the nearest integer HU.
CtVolume resample_isotropic(const CtVolume& vol, double target_mm);

}  // namespace radpipe
