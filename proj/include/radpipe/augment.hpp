#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radpipe/image.hpp"

namespace radpipe {

enum class TransformKind { Rotate, Flip, Noise, Gamma };

const char* transform_kind_name(TransformKind k);

// One augmentation transform with its parameter. Valid ranges:
//   rotate: angle in {90, 180, 270} or [-15, 15] degrees
//   flip:   axis 0 = vertical (rows), 1 = horizontal (cols)
//   noise:  sigma >= 0 gray levels
//   gamma:  g in [0.7, 1.5]
struct Transform {
  TransformKind kind = TransformKind::Flip;
  double angle_deg = 0.0;
  int flip_axis = 0;
  double noise_sigma = 0.0;
  double gamma = 1.0;

  std::string describe() const;
};

struct AugmentPolicy {
  uint64_t seed = 0;
  double target_ratio = 1.0;  // minority/majority count ratio to reach, in (0,1]
  double noise_sigma = 5.0;
  double gamma_min = 0.7;
  double gamma_max = 1.5;
  double max_angle_deg = 15.0;
};

// Where a slice came from; synthetic slices record the full chain so audits
// can replay them.
struct SliceProvenance {
  bool synthetic = false;
  int source_slice = -1;         // slice_index of the source
  std::string transform_chain;   // e.g. "rotate(90)"
  uint64_t seed = 0;
};

struct LabeledSlice {
  std::string patient_id;
  int label = 0;
  int slice_index = 0;  // index within the patient's ROI stack
  Image image;
  SliceProvenance provenance;
};

// Apply one transform. 90-degree multiples are exact pixel permutations;
// other angles use bilinear interpolation with zero fill; noise is Gaussian
// with clamping; gamma maps v -> 255*(v/255)^g rounded.
Image apply_transform(const Image& img, const Transform& t, uint64_t seed);

// Class balancing for a training split. Every majority slice gains one
// randomly parameterized transform copy; minority sources gain rounds of all
// four transform kinds (fresh parameters each round) until
// minority/majority >= target, counted against the final majority total.
// Originals are retained and every synthetic slice carries provenance.
std::vector<LabeledSlice> balance_cohort(const std::vector<LabeledSlice>& slices,
                                         const AugmentPolicy& policy);

}  // namespace radpipe
