#include <filesystem>

#include "doctest.h"
#include "radpipe/error.hpp"
#include "radpipe/roi.hpp"
#include "radpipe/rng.hpp"
#include "test_support.hpp"

using namespace radpipe;

namespace {

GrayVolume sphere_phantom(int nz, int ny, int nx, std::array<int, 3> center, double r,
                          uint8_t inside, uint8_t outside) {
  GrayVolume v;
  v.dims = {nz, ny, nx};
  v.spacing = {1, 1, 1};
  v.voxels.assign(static_cast<size_t>(nz) * ny * nx, outside);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        double dz = z - center[0], dy = y - center[1], dx = x - center[2];
        if (dz * dz + dy * dy + dx * dx <= r * r) v.at(z, y, x) = inside;
      }
  return v;
}

}  // namespace

TEST_SUITE("roi") {

TEST_CASE("crop_roi: centered crop preserves the center voxel at (64,64)") {
  GrayVolume v;
  v.dims = {40, 256, 256};
  v.spacing = {1, 1, 1};
  v.voxels.assign(static_cast<size_t>(40) * 256 * 256, 7);
  Annotation ann{"p0", 1, {20, 128, 128}, 5};
  v.at(20, 128, 128) = 201;

  RoiStack stack = crop_roi(v, ann);
  CHECK(stack.slices() == 5);
  CHECK(stack.side() == 128);
  // center slice is index 2 for S=5
  CHECK(stack.slice(2).at(64, 64) == 201);
  CHECK(stack.slice(0).at(64, 64) == 7);
  CHECK(stack.patient_id == "p0");
  CHECK(stack.label == 1);
}

TEST_CASE("crop_roi: even slice count biases one slice downward") {
  GrayVolume v;
  v.dims = {10, 130, 130};
  v.spacing = {1, 1, 1};
  v.voxels.assign(static_cast<size_t>(10) * 130 * 130, 0);
  // mark each slice with its index
  for (int z = 0; z < 10; ++z) v.at(z, 65, 65) = static_cast<uint8_t>(z + 1);

  Annotation ann{"p0", 0, {5, 65, 65}, 4};
  RoiStack stack = crop_roi(v, ann);
  // slices 3,4,5,6: two below center, center, one above
  CHECK(stack.slice(0).at(64, 64) == 4);
  CHECK(stack.slice(1).at(64, 64) == 5);
  CHECK(stack.slice(2).at(64, 64) == 6);
  CHECK(stack.slice(3).at(64, 64) == 7);
}

TEST_CASE("crop_roi: out-of-bounds pixels are zero") {
  GrayVolume v;
  v.dims = {3, 200, 200};
  v.spacing = {1, 1, 1};
  v.voxels.assign(static_cast<size_t>(3) * 200 * 200, 55);
  Annotation ann{"p0", 0, {1, 10, 10}, 1};
  RoiStack stack = crop_roi(v, ann);
  // rows/cols above 64+10 come from inside the volume; the top-left corner
  // is outside and must be zero
  CHECK(stack.slice(0).at(0, 0) == 0);
  CHECK(stack.slice(0).at(64, 64) == 55);
  CHECK(stack.slice(0).at(127, 127) == 55);
  // padding boundary: pixel (r, c) maps to volume row r + 10 - 64
  CHECK(stack.slice(0).at(53, 64) == 0);
  CHECK(stack.slice(0).at(54, 64) == 55);
}

TEST_CASE("crop_roi: errors for bad annotations") {
  GrayVolume v;
  v.dims = {4, 150, 150};
  v.spacing = {1, 1, 1};
  v.voxels.assign(static_cast<size_t>(4) * 150 * 150, 0);

  Annotation outside{"p0", 0, {4, 10, 10}, 1};
  CHECK_THROWS_WITH_AS(crop_roi(v, outside), doctest::Contains("center outside"), Error);

  Annotation too_many{"p0", 0, {2, 75, 75}, 5};
  CHECK_THROWS_WITH_AS(crop_roi(v, too_many), doctest::Contains("exceeds volume"), Error);
}

TEST_CASE("crop_roi: bright-sphere phantom raises crop mean above slice mean") {
  auto v = sphere_phantom(21, 200, 200, {10, 90, 110}, 8.0, 220, 30);
  Annotation ann{"p0", 1, {10, 90, 110}, 9};
  RoiStack stack = crop_roi(v, ann);

  double crop_mean = 0;
  for (uint8_t px : stack.vox.voxels) crop_mean += px;
  crop_mean /= static_cast<double>(stack.vox.voxels.size());

  double slice_mean = 0;
  for (int y = 0; y < 200; ++y)
    for (int x = 0; x < 200; ++x) slice_mean += v.at(10, y, x);
  slice_mean /= 200.0 * 200.0;

  CHECK(crop_mean > slice_mean);
}

TEST_CASE("crop_roi: output depends only on the 128-pixel window") {
  Rng rng(4);
  GrayVolume v;
  v.dims = {3, 300, 300};
  v.spacing = {1, 1, 1};
  v.voxels.resize(static_cast<size_t>(3) * 300 * 300);
  for (auto& px : v.voxels) px = static_cast<uint8_t>(rng.uniform_int(256));

  Annotation ann{"p0", 0, {1, 150, 150}, 3};
  RoiStack a = crop_roi(v, ann);

  // mutate voxels strictly outside the crop window (farther than 64 in y/x)
  GrayVolume w = v;
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 300; ++y)
      for (int x = 0; x < 300; ++x)
        if (std::abs(y - 150) > 64 || std::abs(x - 150) > 64) w.at(z, y, x) = 0;
  RoiStack b = crop_roi(w, ann);
  CHECK(a.vox.voxels == b.vox.voxels);
}

TEST_CASE("synth_channels: replicate makes three identical channels") {
  Rng rng(6);
  GrayVolume v;
  v.dims = {3, 140, 140};
  v.spacing = {1, 1, 1};
  v.voxels.resize(static_cast<size_t>(3) * 140 * 140);
  for (auto& px : v.voxels) px = static_cast<uint8_t>(rng.uniform_int(256));
  RoiStack stack = crop_roi(v, {"p0", 0, {1, 70, 70}, 3});

  ChannelImage img = synth_channels(stack, 1, ChannelMode::Replicate);
  CHECK(img.channels == 3);
  const size_t n = static_cast<size_t>(img.side) * img.side;
  for (size_t i = 0; i < n; ++i) {
    CHECK(img.channel(0)[i] == img.channel(1)[i]);
    CHECK(img.channel(1)[i] == img.channel(2)[i]);
  }
  Image center = stack.slice(1);
  for (size_t i = 0; i < n; ++i) CHECK(img.channel(0)[i] == center.px[i]);
}

TEST_CASE("synth_channels: adjacent clamps at stack boundaries") {
  // stack of three constant slices 10/20/30
  GrayVolume v;
  v.dims = {3, 128, 128};
  v.spacing = {1, 1, 1};
  v.voxels.resize(static_cast<size_t>(3) * 128 * 128);
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 128; ++y)
      for (int x = 0; x < 128; ++x) v.at(z, y, x) = static_cast<uint8_t>(10 * (z + 1));
  RoiStack stack = crop_roi(v, {"p0", 0, {1, 64, 64}, 3});

  SUBCASE("interior slice: channel means are 10/20/30") {
    ChannelImage img = synth_channels(stack, 1, ChannelMode::Adjacent);
    const size_t n = static_cast<size_t>(img.side) * img.side;
    for (int c = 0; c < 3; ++c) {
      double mean = 0;
      for (size_t i = 0; i < n; ++i) mean += img.channel(c)[i];
      mean /= static_cast<double>(n);
      CHECK(mean == doctest::Approx(10.0 * (c + 1)));
    }
  }
  SUBCASE("first slice: channels are slices (0,0,1)") {
    ChannelImage img = synth_channels(stack, 0, ChannelMode::Adjacent);
    CHECK(img.channel(0)[0] == 10);
    CHECK(img.channel(1)[0] == 10);
    CHECK(img.channel(2)[0] == 20);
  }
  SUBCASE("gray mode keeps one channel") {
    ChannelImage img = synth_channels(stack, 2, ChannelMode::Gray);
    CHECK(img.channels == 1);
    CHECK(img.channel(0)[0] == 30);
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(synth_channels(stack, 3, ChannelMode::Gray), Error);
  }
}

TEST_CASE("cohort manifest round-trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "radpipe_test_manifest";
  fs::remove_all(dir);
  fs::create_directories(dir);

  CohortManifest m;
  m.annotation_spacing_mm = 1.0;
  m.entries.push_back({{"p000", 1, {12, 80, 90}, 17}, "volumes/p000.vol"});
  m.entries.push_back({{"p001", 0, {30, 100, 110}, 24}, "volumes/p001.vol"});
  std::string path = (dir / "cohort.csv").string();
  write_cohort_manifest(m, path);

  CohortManifest back = read_cohort_manifest(path);
  REQUIRE(back.entries.size() == 2);
  CHECK(back.annotation_spacing_mm == 1.0);
  CHECK(back.entries[0].annotation.patient_id == "p000");
  CHECK(back.entries[0].annotation.label == 1);
  CHECK(back.entries[0].annotation.center == std::array<int, 3>{12, 80, 90});
  CHECK(back.entries[0].annotation.slice_count == 17);
  CHECK(back.entries[1].volume_path == "volumes/p001.vol");
}

}  // TEST_SUITE
