#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "radpipe/image.hpp"
#include "radpipe/volume.hpp"

namespace radpipe {

// The lightweight annotation: tumor center voxel (in the resampled volume)
// plus the number of tumor-bearing slices. No segmentation mask exists; the
// ROI mask is always the full cuboid.
struct Annotation {
  std::string patient_id;
  int label = 0;                  // 1 = MYCN amplification present
  std::array<int, 3> center{};    // (z, y, x) voxel index
  int slice_count = 1;
};

// S consecutive gray slices of side x side pixels centered on the annotation.
// The occupancy mask is the full cuboid by construction, so only its geometry
// is stored (dims + spacing); voxels are slice-major.
struct RoiStack {
  std::string patient_id;
  int label = 0;
  GrayVolume vox;  // dims = (S, side, side)

  int slices() const { return vox.dims[0]; }
  int side() const { return vox.dims[1]; }

  Image slice(int i) const {
    Image img(side());
    const size_t n = static_cast<size_t>(side()) * side();
    std::copy(vox.voxels.begin() + i * n, vox.voxels.begin() + (i + 1) * n,
              img.px.begin());
    return img;
  }
};

enum class ChannelMode { Gray, Replicate, Adjacent };

const char* channel_mode_name(ChannelMode m);
ChannelMode channel_mode_from_name(const std::string& name);

// One (1- or 3-)channel image synthesized from a stack slice, shaped for a
// pretrained RGB classifier. Channel-major storage.
struct ChannelImage {
  int channels = 0;
  int side = 0;
  int source_slice = 0;
  ChannelMode mode = ChannelMode::Gray;
  std::vector<uint8_t> data;  // channels * side * side

  const uint8_t* channel(int c) const {
    return data.data() + static_cast<size_t>(c) * side * side;
  }
};

// Crop the fixed-size window around the annotated center from every selected
// slice. Slices are the S consecutive z indices centered on center.z (even S
// biases one slice downward); pixels outside the volume are zero.
RoiStack crop_roi(const GrayVolume& vol, const Annotation& ann, int side = 128);

ChannelImage synth_channels(const RoiStack& stack, int slice_index, ChannelMode mode);

// Cohort manifest: CSV with one record per patient.
// Columns: patient_id,label,volume,center_z,center_y,center_x,slice_count
// A `# annotation_spacing_mm = <t>` comment records the voxel grid the
// centers refer to; preprocess validates it against the configured target.
struct CohortEntry {
  Annotation annotation;
  std::string volume_path;  // relative to the manifest file
};

struct CohortManifest {
  double annotation_spacing_mm = 1.0;
  std::vector<CohortEntry> entries;
};

CohortManifest read_cohort_manifest(const std::string& path);
void write_cohort_manifest(const CohortManifest& manifest, const std::string& path);

}  // namespace radpipe
