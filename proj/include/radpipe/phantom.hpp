#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "radpipe/roi.hpp"

namespace radpipe {

// Synthetic CT cohort with a texture-borne class signal: tumors are
// ellipsoids whose voxel values carry multiplicative speckle, stronger for
// the positive class (heterogeneity knobs h+ > h- >= 0). Size and shape are
// class-independent so cuboid shape features carry no label information.
struct PhantomParams {
  int n_patients = 24;
  int n_positive = 4;
  std::array<int, 3> dims{100, 128, 128};
  std::array<double, 3> spacing{2.0, 1.0, 1.0};
  double target_spacing_mm = 1.0;  // grid the annotations are expressed on
  double tumor_radius_min_mm = 15.0;
  double tumor_radius_max_mm = 35.0;
  double background_hu = 40.0;
  double background_noise_hu = 4.0;
  double tumor_hu = 80.0;
  double tumor_hu_jitter = 5.0;
  double speckle_pos = 0.2;  // h+
  double speckle_neg = 0.1;  // h-
  uint64_t seed = 0;
};

// Writes one volume per patient plus the cohort manifest (cohort.csv) into
// out_dir; returns the manifest path. Fully deterministic per seed.
std::string generate_cohort(const PhantomParams& params, const std::string& out_dir);

}  // namespace radpipe
