#include "radpipe/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radpipe/error.hpp"
#include "radpipe/kernels.hpp"

namespace fs = std::filesystem;

namespace radpipe {

namespace {

struct Header {
  std::array<int, 3> dims{};
  std::array<double, 3> spacing{};
  std::string dtype;
  std::string data;
};

Header parse_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "volume: missing header file: " + path);

  Header h;
  bool have_dims = false, have_spacing = false, have_dtype = false, have_data = false;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::MalformedHeader, "volume: malformed header line '" + line + "' in " + path);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    std::istringstream vs(val);
    if (key == "dims") {
      if (!(vs >> h.dims[0] >> h.dims[1] >> h.dims[2]))
        fail(ErrorCode::MalformedHeader, "volume: bad dims in " + path);
      have_dims = true;
    } else if (key == "spacing") {
      if (!(vs >> h.spacing[0] >> h.spacing[1] >> h.spacing[2]))
        fail(ErrorCode::MalformedHeader, "volume: bad spacing in " + path);
      have_spacing = true;
    } else if (key == "dtype") {
      h.dtype = val;
      have_dtype = true;
    } else if (key == "data") {
      h.data = val;
      have_data = true;
    } else {
      fail(ErrorCode::MalformedHeader, "volume: unknown header key '" + key + "' in " + path);
    }
  }
  if (!have_dims || !have_spacing || !have_dtype || !have_data)
    fail(ErrorCode::MalformedHeader, "volume: incomplete header: " + path);
  for (int d : h.dims)
    if (d < 1) fail(ErrorCode::MalformedHeader, "volume: non-positive dims in " + path);
  for (double s : h.spacing)
    if (!(s > 0.0)) fail(ErrorCode::MalformedHeader, "volume: non-positive spacing in " + path);
  return h;
}

std::string raw_path_for(const std::string& header_path, const std::string& data) {
  return (fs::path(header_path).parent_path() / data).string();
}

std::vector<char> read_raw(const std::string& path, size_t expected_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MissingFile, "volume: missing raw file: " + path);
  in.seekg(0, std::ios::end);
  auto len = static_cast<size_t>(in.tellg());
  if (len != expected_bytes) {
    fail(ErrorCode::SizeMismatch,
         "volume: raw size mismatch for " + path + ": expected " +
             std::to_string(expected_bytes) + " bytes, found " + std::to_string(len));
  }
  in.seekg(0);
  std::vector<char> buf(len);
  in.read(buf.data(), static_cast<std::streamsize>(len));
  if (!in) fail(ErrorCode::Io, "volume: short read: " + path);
  return buf;
}

void write_header(const std::string& header_path, const std::array<int, 3>& dims,
                  const std::array<double, 3>& spacing, const char* dtype,
                  const std::string& data_name) {
  std::ofstream out(header_path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "volume: cannot write header: " + header_path);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "dims = %d %d %d\nspacing = %.9g %.9g %.9g\ndtype = %s\ndata = %s\n",
                dims[0], dims[1], dims[2], spacing[0], spacing[1], spacing[2], dtype,
                data_name.c_str());
  out << buf;
  if (!out) fail(ErrorCode::Io, "volume: short header write: " + header_path);
}

std::string data_name_for(const std::string& header_path) {
  fs::path p(header_path);
  return p.stem().string() + ".raw";
}

}  // namespace

CtVolume read_volume(const std::string& header_path) {
  Header h = parse_header(header_path);
  if (h.dtype != "int16-le")
    fail(ErrorCode::MalformedHeader,
         "volume: expected dtype int16-le, got '" + h.dtype + "' in " + header_path);
  CtVolume vol;
  vol.dims = h.dims;
  vol.spacing = h.spacing;
  size_t n = static_cast<size_t>(h.dims[0]) * h.dims[1] * h.dims[2];
  auto raw = read_raw(raw_path_for(header_path, h.data), n * 2);
  vol.voxels.resize(n);
  // little-endian on-disk; decode explicitly so the format is portable
  for (size_t i = 0; i < n; ++i) {
    uint16_t u = static_cast<uint8_t>(raw[2 * i]) |
                 (static_cast<uint16_t>(static_cast<uint8_t>(raw[2 * i + 1])) << 8);
    vol.voxels[i] = static_cast<int16_t>(u);
  }
  return vol;
}

void write_volume(const CtVolume& vol, const std::string& header_path) {
  size_t n = static_cast<size_t>(vol.dims[0]) * vol.dims[1] * vol.dims[2];
  if (n != vol.voxels.size())
    fail(ErrorCode::SizeMismatch, "volume: dims/voxel count mismatch on write");
  std::string data_name = data_name_for(header_path);
  write_header(header_path, vol.dims, vol.spacing, "int16-le", data_name);
  std::ofstream out(raw_path_for(header_path, data_name), std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "volume: cannot write raw: " + data_name);
  std::vector<char> raw(n * 2);
  for (size_t i = 0; i < n; ++i) {
    uint16_t u = static_cast<uint16_t>(vol.voxels[i]);
    raw[2 * i] = static_cast<char>(u & 0xff);
    raw[2 * i + 1] = static_cast<char>(u >> 8);
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) fail(ErrorCode::Io, "volume: short raw write");
}

GrayVolume read_gray_volume(const std::string& header_path) {
  Header h = parse_header(header_path);
  if (h.dtype != "uint8")
    fail(ErrorCode::MalformedHeader,
         "volume: expected dtype uint8, got '" + h.dtype + "' in " + header_path);
  GrayVolume vol;
  vol.dims = h.dims;
  vol.spacing = h.spacing;
  size_t n = static_cast<size_t>(h.dims[0]) * h.dims[1] * h.dims[2];
  auto raw = read_raw(raw_path_for(header_path, h.data), n);
  vol.voxels.assign(raw.begin(), raw.end());
  return vol;
}

void write_gray_volume(const GrayVolume& vol, const std::string& header_path) {
  size_t n = static_cast<size_t>(vol.dims[0]) * vol.dims[1] * vol.dims[2];
  if (n != vol.voxels.size())
    fail(ErrorCode::SizeMismatch, "volume: dims/voxel count mismatch on write");
  std::string data_name = data_name_for(header_path);
  write_header(header_path, vol.dims, vol.spacing, "uint8", data_name);
  std::ofstream out(raw_path_for(header_path, data_name), std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "volume: cannot write raw: " + data_name);
  out.write(reinterpret_cast<const char*>(vol.voxels.data()),
            static_cast<std::streamsize>(n));
  if (!out) fail(ErrorCode::Io, "volume: short raw write");
}

GrayVolume hu_to_gray(const CtVolume& vol, const Window& window) {
  if (!(window.width > 0.0))
    fail(ErrorCode::BadArgument, "hu_to_gray: window width must be positive");
  GrayVolume out;
  out.dims = vol.dims;
  out.spacing = vol.spacing;
  out.voxels.resize(vol.voxels.size());
  float lo = static_cast<float>(window.center - window.width / 2.0);
  float inv_width = static_cast<float>(1.0 / window.width);
  kernels::ops().window_i16_u8(vol.voxels.data(), out.voxels.data(), vol.voxels.size(),
                               lo, inv_width);
  return out;
}

CtVolume resample_isotropic(const CtVolume& vol, double target_mm) {
  if (!(target_mm > 0.0))
    fail(ErrorCode::BadArgument, "resample_isotropic: target spacing must be positive");

  CtVolume out;
  out.spacing = {target_mm, target_mm, target_mm};
  for (int a = 0; a < 3; ++a) {
    double extent = vol.dims[a] * vol.spacing[a];
    out.dims[a] = std::max(1, static_cast<int>(std::llround(extent / target_mm)));
  }
  out.voxels.resize(static_cast<size_t>(out.dims[0]) * out.dims[1] * out.dims[2]);

  // Per-axis sample positions: voxel centers aligned, edge-clamped.
  struct AxisMap {
    std::vector<int> i0;
    std::vector<double> frac;
  };
  std::array<AxisMap, 3> maps;
  for (int a = 0; a < 3; ++a) {
    maps[a].i0.resize(out.dims[a]);
    maps[a].frac.resize(out.dims[a]);
    double scale = target_mm / vol.spacing[a];
    for (int i = 0; i < out.dims[a]; ++i) {
      double f = (i + 0.5) * scale - 0.5;
      if (f < 0.0) f = 0.0;
      double fmax = static_cast<double>(vol.dims[a] - 1);
      if (f > fmax) f = fmax;
      int i0 = static_cast<int>(f);
      if (i0 > vol.dims[a] - 2) i0 = std::max(0, vol.dims[a] - 2);
      maps[a].i0[i] = i0;
      maps[a].frac[i] = f - i0;
    }
  }

  const int ny = vol.dims[1], nx = vol.dims[2];
  const auto& src = vol.voxels;
  size_t w = 0;
  for (int z = 0; z < out.dims[0]; ++z) {
    int z0 = maps[0].i0[z];
    double fz = maps[0].frac[z];
    int z1 = vol.dims[0] > 1 ? z0 + 1 : z0;
    for (int y = 0; y < out.dims[1]; ++y) {
      int y0 = maps[1].i0[y];
      double fy = maps[1].frac[y];
      int y1 = vol.dims[1] > 1 ? y0 + 1 : y0;
      size_t base00 = (static_cast<size_t>(z0) * ny + y0) * nx;
      size_t base01 = (static_cast<size_t>(z0) * ny + y1) * nx;
      size_t base10 = (static_cast<size_t>(z1) * ny + y0) * nx;
      size_t base11 = (static_cast<size_t>(z1) * ny + y1) * nx;
      for (int x = 0; x < out.dims[2]; ++x) {
        int x0 = maps[2].i0[x];
        double fx = maps[2].frac[x];
        int x1 = vol.dims[2] > 1 ? x0 + 1 : x0;
        double c00 = src[base00 + x0] * (1.0 - fx) + src[base00 + x1] * fx;
        double c01 = src[base01 + x0] * (1.0 - fx) + src[base01 + x1] * fx;
        double c10 = src[base10 + x0] * (1.0 - fx) + src[base10 + x1] * fx;
        double c11 = src[base11 + x0] * (1.0 - fx) + src[base11 + x1] * fx;
        double c0 = c00 * (1.0 - fy) + c01 * fy;
        double c1 = c10 * (1.0 - fy) + c11 * fy;
        double v = c0 * (1.0 - fz) + c1 * fz;
        long long r = std::llround(v);
        if (r < -32768) r = -32768;
        if (r > 32767) r = 32767;
        out.voxels[w++] = static_cast<int16_t>(r);
      }
    }
  }
  return out;
}

}  // namespace radpipe
