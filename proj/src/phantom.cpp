#include "radpipe/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "radpipe/error.hpp"
#include "radpipe/rng.hpp"
#include "radpipe/volume.hpp"

namespace fs = std::filesystem;

namespace radpipe {

namespace {

void validate(const PhantomParams& p) {
  if (!(p.n_positive > 0 && p.n_positive < p.n_patients))
    fail(ErrorCode::BadArgument, "phantom: need 0 < n_positive < n_patients");
  if (!(p.speckle_pos > p.speckle_neg && p.speckle_neg >= 0.0))
    fail(ErrorCode::BadArgument, "phantom: need h+ > h- >= 0");
  if (!(p.tumor_radius_min_mm > 0 && p.tumor_radius_max_mm >= p.tumor_radius_min_mm))
    fail(ErrorCode::BadArgument, "phantom: bad tumor radius range");
  if (!(p.target_spacing_mm > 0))
    fail(ErrorCode::BadArgument, "phantom: bad target spacing");
  for (int a = 0; a < 3; ++a) {
    double extent = p.dims[a] * p.spacing[a];
    double needed = 2.0 * (p.tumor_radius_max_mm + 5.0 * p.spacing[a]);
    if (extent < needed)
      fail(ErrorCode::BadArgument,
           "phantom: volume extent too small for the tumor radius range plus a "
           "5-voxel margin");
  }
}

// White Gaussian field smoothed by a 3-tap box blur per axis, then rescaled
// to zero mean / unit variance. Smoothing gives the speckle a spatial scale
// that survives isotropic resampling.
std::vector<double> smooth_unit_field(Rng& rng, int nz, int ny, int nx) {
  const size_t n = static_cast<size_t>(nz) * ny * nx;
  std::vector<double> field(n);
  for (auto& v : field) v = rng.normal();

  auto idx = [&](int z, int y, int x) {
    return (static_cast<size_t>(z) * ny + y) * nx + x;
  };
  std::vector<double> tmp(n);
  auto blur_axis = [&](int axis) {
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
          int c[3] = {z, y, x};
          double acc = 0.0;
          int cnt = 0;
          for (int d = -1; d <= 1; ++d) {
            int cc[3] = {z, y, x};
            cc[axis] = c[axis] + d;
            int limit = axis == 0 ? nz : axis == 1 ? ny : nx;
            if (cc[axis] < 0 || cc[axis] >= limit) continue;
            acc += field[idx(cc[0], cc[1], cc[2])];
            ++cnt;
          }
          tmp[idx(z, y, x)] = acc / cnt;
        }
    field.swap(tmp);
  };
  blur_axis(0);
  blur_axis(1);
  blur_axis(2);

  double mean = 0.0;
  for (double v : field) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : field) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  double inv_sd = var > 0 ? 1.0 / std::sqrt(var) : 1.0;
  for (auto& v : field) v = (v - mean) * inv_sd;
  return field;
}

}  // namespace

std::string generate_cohort(const PhantomParams& params, const std::string& out_dir) {
  validate(params);

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "volumes", ec);
  if (ec) fail(ErrorCode::Io, "phantom: cannot create output directory " + out_dir);
  {
    // writability probe; a read-only target should fail before any work
    fs::path probe = fs::path(out_dir) / ".write_probe";
    FILE* fp = std::fopen(probe.string().c_str(), "wb");
    if (!fp) fail(ErrorCode::Io, "phantom: output directory not writable: " + out_dir);
    std::fclose(fp);
    fs::remove(probe, ec);
  }

  CohortManifest manifest;
  manifest.annotation_spacing_mm = params.target_spacing_mm;

  const int nz = params.dims[0], ny = params.dims[1], nx = params.dims[2];
  const auto [sz, sy, sx] = params.spacing;

  for (int pi = 0; pi < params.n_patients; ++pi) {
    Rng rng(derive_seed(params.seed, "patient", static_cast<uint64_t>(pi)));
    const int label = pi < params.n_positive ? 1 : 0;
    const double h = label ? params.speckle_pos : params.speckle_neg;

    // tumor geometry in physical coordinates
    std::array<double, 3> radius_mm;
    for (auto& r : radius_mm)
      r = rng.uniform(params.tumor_radius_min_mm, params.tumor_radius_max_mm);
    std::array<double, 3> center_mm;
    const double spacings[3] = {sz, sy, sx};
    const int dims[3] = {nz, ny, nx};
    for (int a = 0; a < 3; ++a) {
      double margin = radius_mm[a] + 5.0 * spacings[a];
      center_mm[a] = rng.uniform(margin, dims[a] * spacings[a] - margin);
    }
    const double base_hu =
        params.tumor_hu + rng.uniform(-params.tumor_hu_jitter, params.tumor_hu_jitter);

    CtVolume vol;
    vol.dims = params.dims;
    vol.spacing = params.spacing;
    vol.voxels.resize(static_cast<size_t>(nz) * ny * nx);

    // background
    for (auto& v : vol.voxels) {
      double hu = params.background_hu + params.background_noise_hu * rng.normal();
      v = static_cast<int16_t>(std::clamp<long long>(std::llround(hu), -32768, 32767));
    }

    // tumor bounding box in voxel indices
    int lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(0, static_cast<int>((center_mm[a] - radius_mm[a]) / spacings[a]) - 1);
      hi[a] = std::min(dims[a] - 1,
                       static_cast<int>((center_mm[a] + radius_mm[a]) / spacings[a]) + 1);
    }
    auto speckle = smooth_unit_field(rng, hi[0] - lo[0] + 1, hi[1] - lo[1] + 1,
                                     hi[2] - lo[2] + 1);
    auto speckle_at = [&](int z, int y, int x) {
      return speckle[(static_cast<size_t>(z - lo[0]) * (hi[1] - lo[1] + 1) +
                      (y - lo[1])) *
                         (hi[2] - lo[2] + 1) +
                     (x - lo[2])];
    };

    for (int z = lo[0]; z <= hi[0]; ++z) {
      double pz = (z + 0.5) * sz;
      for (int y = lo[1]; y <= hi[1]; ++y) {
        double py = (y + 0.5) * sy;
        for (int x = lo[2]; x <= hi[2]; ++x) {
          double px = (x + 0.5) * sx;
          double dz = (pz - center_mm[0]) / radius_mm[0];
          double dy = (py - center_mm[1]) / radius_mm[1];
          double dx = (px - center_mm[2]) / radius_mm[2];
          if (dz * dz + dy * dy + dx * dx > 1.0) continue;
          double hu = base_hu * (1.0 + h * speckle_at(z, y, x));
          vol.at(z, y, x) =
              static_cast<int16_t>(std::clamp<long long>(std::llround(hu), -32768, 32767));
        }
      }
    }

    char name[32];
    std::snprintf(name, sizeof(name), "p%03d", pi);
    std::string volume_rel = std::string("volumes/") + name + ".vol";
    write_volume(vol, (fs::path(out_dir) / volume_rel).string());

    // annotation on the resampled grid
    const double t = params.target_spacing_mm;
    Annotation ann;
    ann.patient_id = name;
    ann.label = label;
    for (int a = 0; a < 3; ++a)
      ann.center[a] = static_cast<int>(center_mm[a] / t);
    ann.slice_count = std::max(1, static_cast<int>(std::llround(2.0 * radius_mm[0] / t)));
    manifest.entries.push_back({ann, volume_rel});
  }

  std::string manifest_path = (fs::path(out_dir) / "cohort.csv").string();
  write_cohort_manifest(manifest, manifest_path);
  return manifest_path;
}

}  // namespace radpipe
