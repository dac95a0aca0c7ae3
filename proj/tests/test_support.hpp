#pragma once

#include <cmath>
#include <cstdint>

#include "radpipe/radiomics.hpp"
#include "radpipe/rng.hpp"
#include "radpipe/volume.hpp"

namespace testsup {

inline bool close_rel(double a, double b, double tol = 1e-9) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

// Random gray stack with values quantized so discretization occupies at most
// `max_levels` bins of the given width.
inline radpipe::GrayVolume random_stack(radpipe::Rng& rng, int nz, int ny, int nx,
                                        int max_levels, double bin_width = 25.0) {
  radpipe::GrayVolume v;
  v.dims = {nz, ny, nx};
  v.spacing = {1.0, 1.0, 1.0};
  v.voxels.resize(static_cast<size_t>(nz) * ny * nx);
  for (auto& px : v.voxels) {
    int level = static_cast<int>(rng.uniform_int(max_levels));
    int offset = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(bin_width)));
    px = static_cast<uint8_t>(std::min(255, static_cast<int>(level * bin_width) + offset));
  }
  return v;
}

inline radpipe::GrayVolume constant_stack(int nz, int ny, int nx, uint8_t value) {
  radpipe::GrayVolume v;
  v.dims = {nz, ny, nx};
  v.spacing = {1.0, 1.0, 1.0};
  v.voxels.assign(static_cast<size_t>(nz) * ny * nx, value);
  return v;
}

// Build a DiscreteStack directly from explicit levels (1..ng).
inline radpipe::DiscreteStack make_discrete(int nz, int ny, int nx,
                                            std::vector<int> levels) {
  radpipe::DiscreteStack d;
  d.dims = {nz, ny, nx};
  d.spacing = {1.0, 1.0, 1.0};
  d.levels = std::move(levels);
  d.ng = 1;
  for (int v : d.levels) d.ng = std::max(d.ng, v);
  return d;
}

}  // namespace testsup
