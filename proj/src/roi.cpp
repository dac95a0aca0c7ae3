#include "radpipe/roi.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radpipe/error.hpp"
#include "radpipe/util.hpp"

namespace radpipe {

const char* channel_mode_name(ChannelMode m) {
  switch (m) {
    case ChannelMode::Gray: return "gray";
    case ChannelMode::Replicate: return "replicate";
    case ChannelMode::Adjacent: return "adjacent";
  }
  return "?";
}

ChannelMode channel_mode_from_name(const std::string& name) {
  if (name == "gray") return ChannelMode::Gray;
  if (name == "replicate") return ChannelMode::Replicate;
  if (name == "adjacent") return ChannelMode::Adjacent;
  fail(ErrorCode::BadArgument, "unknown channel mode: " + name);
}

RoiStack crop_roi(const GrayVolume& vol, const Annotation& ann, int side) {
  const int nz = vol.dims[0], ny = vol.dims[1], nx = vol.dims[2];
  const auto [cz, cy, cx] = ann.center;
  if (cz < 0 || cz >= nz || cy < 0 || cy >= ny || cx < 0 || cx >= nx)
    fail(ErrorCode::BadArgument,
         "crop_roi: center outside volume for patient " + ann.patient_id);
  if (ann.slice_count < 1)
    fail(ErrorCode::BadArgument, "crop_roi: slice_count must be >= 1");
  if (ann.slice_count > nz)
    fail(ErrorCode::BadArgument,
         "crop_roi: slice_count " + std::to_string(ann.slice_count) +
             " exceeds volume z extent " + std::to_string(nz) + " for patient " +
             ann.patient_id);

  const int S = ann.slice_count;
  const int z0 = cz - S / 2;  // even S: S/2 below, S/2-1 above
  const int half = side / 2;
  const int y0 = cy - half;
  const int x0 = cx - half;

  RoiStack stack;
  stack.patient_id = ann.patient_id;
  stack.label = ann.label;
  stack.vox.dims = {S, side, side};
  stack.vox.spacing = vol.spacing;
  stack.vox.voxels.assign(static_cast<size_t>(S) * side * side, 0);

  for (int s = 0; s < S; ++s) {
    int z = z0 + s;
    if (z < 0 || z >= nz) continue;  // whole slice out of bounds: stays zero
    int ry0 = std::max(0, -y0), ry1 = std::min(side, ny - y0);
    int rx0 = std::max(0, -x0), rx1 = std::min(side, nx - x0);
    for (int r = ry0; r < ry1; ++r) {
      const uint8_t* src = &vol.voxels[(static_cast<size_t>(z) * ny + (y0 + r)) * nx];
      uint8_t* dst = &stack.vox.voxels[(static_cast<size_t>(s) * side + r) * side];
      std::copy(src + (x0 + rx0), src + (x0 + rx1), dst + rx0);
    }
  }
  return stack;
}

ChannelImage synth_channels(const RoiStack& stack, int slice_index, ChannelMode mode) {
  const int S = stack.slices();
  if (slice_index < 0 || slice_index >= S)
    fail(ErrorCode::BadArgument, "synth_channels: slice index out of range");

  const int side = stack.side();
  const size_t n = static_cast<size_t>(side) * side;
  auto slice_ptr = [&](int i) { return stack.vox.voxels.data() + i * n; };

  ChannelImage out;
  out.side = side;
  out.source_slice = slice_index;
  out.mode = mode;
  switch (mode) {
    case ChannelMode::Gray:
      out.channels = 1;
      out.data.assign(slice_ptr(slice_index), slice_ptr(slice_index) + n);
      break;
    case ChannelMode::Replicate: {
      out.channels = 3;
      out.data.resize(3 * n);
      for (int c = 0; c < 3; ++c)
        std::copy(slice_ptr(slice_index), slice_ptr(slice_index) + n,
                  out.data.begin() + c * n);
      break;
    }
    case ChannelMode::Adjacent: {
      out.channels = 3;
      out.data.resize(3 * n);
      int idx[3] = {std::max(0, slice_index - 1), slice_index,
                    std::min(S - 1, slice_index + 1)};
      for (int c = 0; c < 3; ++c)
        std::copy(slice_ptr(idx[c]), slice_ptr(idx[c]) + n, out.data.begin() + c * n);
      break;
    }
  }
  return out;
}

CohortManifest read_cohort_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "cohort: missing manifest: " + path);

  CohortManifest m;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq != std::string::npos && line.find("annotation_spacing_mm") != std::string::npos)
        m.annotation_spacing_mm = std::stod(line.substr(eq + 1));
      continue;
    }
    auto fields = split_csv_line(line);
    if (!saw_header) {
      if (fields.empty() || fields[0] != "patient_id")
        fail(ErrorCode::MalformedHeader, "cohort: expected CSV header in " + path);
      saw_header = true;
      continue;
    }
    if (fields.size() != 7)
      fail(ErrorCode::MalformedHeader, "cohort: expected 7 fields, got " +
                                           std::to_string(fields.size()) + " in " + path);
    CohortEntry e;
    try {
      e.annotation.patient_id = fields[0];
      e.annotation.label = std::stoi(fields[1]);
      e.volume_path = fields[2];
      e.annotation.center = {std::stoi(fields[3]), std::stoi(fields[4]),
                             std::stoi(fields[5])};
      e.annotation.slice_count = std::stoi(fields[6]);
    } catch (const std::exception&) {
      fail(ErrorCode::MalformedHeader, "cohort: unparsable record '" + line + "'");
    }
    if (e.annotation.label != 0 && e.annotation.label != 1)
      fail(ErrorCode::MalformedHeader,
           "cohort: label must be 0 or 1 for patient " + e.annotation.patient_id);
    if (e.annotation.slice_count < 1)
      fail(ErrorCode::MalformedHeader,
           "cohort: slice_count must be >= 1 for patient " + e.annotation.patient_id);
    m.entries.push_back(std::move(e));
  }
  if (!saw_header) fail(ErrorCode::MalformedHeader, "cohort: empty manifest: " + path);
  return m;
}

void write_cohort_manifest(const CohortManifest& manifest, const std::string& path) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", manifest.annotation_spacing_mm);
  out << "# annotation_spacing_mm = " << buf << "\n";
  out << "patient_id,label,volume,center_z,center_y,center_x,slice_count\n";
  for (const auto& e : manifest.entries) {
    const auto& a = e.annotation;
    out << join_csv({a.patient_id, std::to_string(a.label), e.volume_path,
                     std::to_string(a.center[0]), std::to_string(a.center[1]),
                     std::to_string(a.center[2]), std::to_string(a.slice_count)})
        << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace radpipe
