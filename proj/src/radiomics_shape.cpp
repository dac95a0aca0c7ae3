#include <algorithm>
#include <cmath>

#include "radiomics_common.hpp"
#include "radpipe/error.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

// The ROI mask is always the full cuboid (no segmentation exists), so every
// shape feature has a closed form in the physical extents. Axis lengths
// follow the principal-moment convention (4 * sqrt(eigenvalue)) with the
// exact discrete-uniform variance of the voxel-center grid.
NamedValues shape_features(const std::array<int, 3>& dims,
                           const std::array<double, 3>& spacing) {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1) fail(ErrorCode::BadArgument, "shape: empty mask");
    if (!(spacing[a] > 0.0)) fail(ErrorCode::BadArgument, "shape: non-positive spacing");
  }

  const double ez = dims[0] * spacing[0];
  const double ey = dims[1] * spacing[1];
  const double ex = dims[2] * spacing[2];

  const double volume = ez * ey * ex;
  const double surface = 2.0 * (ez * ey + ez * ex + ey * ex);
  const double pi = 3.14159265358979323846;
  const double sphericity = std::cbrt(36.0 * pi * volume * volume) / surface;

  // per-axis variance of voxel centers: s^2 * (n^2 - 1) / 12
  std::array<double, 3> lambda;
  for (int a = 0; a < 3; ++a) {
    double n = dims[a];
    lambda[a] = spacing[a] * spacing[a] * (n * n - 1.0) / 12.0;
  }
  std::array<double, 3> sorted = lambda;
  std::sort(sorted.begin(), sorted.end());  // least, minor, major
  const double least = sorted[0], minor = sorted[1], major = sorted[2];

  const double elongation = major > detail::kDegenerateEps ? std::sqrt(minor / major) : 1.0;
  const double flatness = major > detail::kDegenerateEps ? std::sqrt(least / major) : 1.0;

  return {
      {"Elongation", elongation},
      {"Flatness", flatness},
      {"LeastAxisLength", 4.0 * std::sqrt(least)},
      {"MajorAxisLength", 4.0 * std::sqrt(major)},
      {"Maximum2DDiameterColumn", std::sqrt(ez * ez + ey * ey)},
      {"Maximum2DDiameterRow", std::sqrt(ez * ez + ex * ex)},
      {"Maximum2DDiameterSlice", std::sqrt(ey * ey + ex * ex)},
      {"Maximum3DDiameter", std::sqrt(ez * ez + ey * ey + ex * ex)},
      {"MeshVolume", volume},
      {"MinorAxisLength", 4.0 * std::sqrt(minor)},
      {"Sphericity", sphericity},
      {"SurfaceArea", surface},
      {"SurfaceVolumeRatio", surface / volume},
      {"VoxelVolume", volume},
  };
}

}  // namespace radpipe
