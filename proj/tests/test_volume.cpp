#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "radpipe/error.hpp"
#include "radpipe/rng.hpp"
#include "radpipe/util.hpp"
#include "radpipe/volume.hpp"
#include "test_support.hpp"

using namespace radpipe;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const char* tag) {
  fs::path dir = fs::temp_directory_path() / (std::string("radpipe_test_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CtVolume random_volume(Rng& rng, int nz, int ny, int nx) {
  CtVolume v;
  v.dims = {nz, ny, nx};
  v.spacing = {2.5, 0.5, 0.5};
  v.voxels.resize(static_cast<size_t>(nz) * ny * nx);
  for (auto& x : v.voxels) x = static_cast<int16_t>(rng.uniform_int(2000) - 1000);
  return v;
}

}  // namespace

TEST_SUITE("volume") {

TEST_CASE("read_volume: size arithmetic on dims (3,4,5)") {
  auto dir = make_temp_dir("vol_size");
  std::string header = (dir / "vol.vol").string();

  SUBCASE("correct 120-byte raw yields 60 voxels") {
    write_text_file(header,
                    "dims = 3 4 5\nspacing = 1 1 1\ndtype = int16-le\ndata = vol.raw\n");
    std::ofstream raw(dir / "vol.raw", std::ios::binary);
    std::vector<char> bytes(120, 0);
    raw.write(bytes.data(), bytes.size());
    raw.close();
    CtVolume v = read_volume(header);
    CHECK(v.size() == 60);
  }

  SUBCASE("118-byte raw is a size-mismatch error") {
    write_text_file(header,
                    "dims = 3 4 5\nspacing = 1 1 1\ndtype = int16-le\ndata = vol.raw\n");
    std::ofstream raw(dir / "vol.raw", std::ios::binary);
    std::vector<char> bytes(118, 0);
    raw.write(bytes.data(), bytes.size());
    raw.close();
    CHECK_THROWS_WITH_AS(read_volume(header),
                         doctest::Contains("size mismatch"), Error);
  }

  SUBCASE("distinct diagnostics for other failures") {
    CHECK_THROWS_AS(read_volume((dir / "nope.vol").string()), Error);

    write_text_file(header, "dims = 3 4\nbogus\n");
    CHECK_THROWS_AS(read_volume(header), Error);

    write_text_file(header,
                    "dims = 3 4 5\nspacing = 0 1 1\ndtype = int16-le\ndata = vol.raw\n");
    CHECK_THROWS_WITH_AS(read_volume(header),
                         doctest::Contains("non-positive spacing"), Error);
  }
}

TEST_CASE("write then read round-trips bit-identically") {
  auto dir = make_temp_dir("vol_rt");
  Rng rng(21);
  CtVolume v = random_volume(rng, 4, 6, 5);
  std::string header = (dir / "phantom.vol").string();
  write_volume(v, header);
  CtVolume back = read_volume(header);
  CHECK(back.dims == v.dims);
  CHECK(back.spacing == v.spacing);
  CHECK(back.voxels == v.voxels);
}

TEST_CASE("hu_to_gray: window endpoints and default-window center") {
  CtVolume v;
  v.dims = {1, 1, 5};
  v.spacing = {1, 1, 1};
  // lo = -160, hi = 240 under the default window
  v.voxels = {-160, 240, 40, -1000, 1000};
  GrayVolume g = hu_to_gray(v, {});
  CHECK(g.voxels[0] == 0);
  CHECK(g.voxels[1] == 255);
  CHECK(g.voxels[2] == 128);
  CHECK(g.voxels[3] == 0);
  CHECK(g.voxels[4] == 255);
  CHECK(g.dims == v.dims);
  CHECK(g.spacing == v.spacing);
}

TEST_CASE("hu_to_gray: constant volume maps to constant gray") {
  CtVolume v;
  v.dims = {2, 3, 4};
  v.spacing = {1, 1, 1};
  v.voxels.assign(24, 70);
  GrayVolume g = hu_to_gray(v, {});
  for (uint8_t px : g.voxels) CHECK(px == g.voxels[0]);
}

TEST_CASE("hu_to_gray: monotone non-decreasing in HU") {
  Window w{40, 400};
  CtVolume v;
  v.dims = {1, 1, 4001};
  v.spacing = {1, 1, 1};
  for (int i = 0; i <= 4000; ++i) v.voxels.push_back(static_cast<int16_t>(i - 2000));
  GrayVolume g = hu_to_gray(v, w);
  for (size_t i = 1; i < g.voxels.size(); ++i) CHECK(g.voxels[i] >= g.voxels[i - 1]);
}

TEST_CASE("resample: output dims follow spacing arithmetic") {
  CtVolume v;
  v.dims = {100, 512, 512};
  v.spacing = {2.5, 0.5, 0.5};
  v.voxels.assign(static_cast<size_t>(100) * 512 * 512, 0);
  CtVolume out = resample_isotropic(v, 1.0);
  CHECK(out.dims == std::array<int, 3>{250, 256, 256});
  CHECK(out.spacing == std::array<double, 3>{1.0, 1.0, 1.0});
}

TEST_CASE("resample: identity when already at target spacing") {
  Rng rng(5);
  CtVolume v = random_volume(rng, 4, 8, 8);
  v.spacing = {1.0, 1.0, 1.0};
  CtVolume out = resample_isotropic(v, 1.0);
  CHECK(out.dims == v.dims);
  CHECK(out.voxels == v.voxels);
}

TEST_CASE("resample: linear ramp interpolates within 1 HU of the analytic line") {
  CtVolume v;
  v.dims = {1, 1, 64};
  v.spacing = {1.0, 1.0, 2.0};
  for (int i = 0; i < 64; ++i) v.voxels.push_back(static_cast<int16_t>(10 * i));
  CtVolume out = resample_isotropic(v, 1.0);
  CHECK(out.dims[2] == 128);
  // input voxel i sits at physical x = (i + 0.5) * 2; value = 10 * i
  // analytic line: value(x) = 10 * (x / 2 - 0.5) = 5x - 5
  for (int i = 0; i < out.dims[2]; ++i) {
    double x = (i + 0.5) * 1.0;
    double expected = std::clamp(5.0 * x - 5.0, 0.0, 630.0);  // edge clamp
    CHECK(std::abs(out.voxels[i] - expected) <= 1.0);
  }
}

TEST_CASE("resample: preserves global min/max bounds") {
  Rng rng(17);
  CtVolume v = random_volume(rng, 6, 10, 12);
  auto [mn, mx] = std::minmax_element(v.voxels.begin(), v.voxels.end());
  CtVolume out = resample_isotropic(v, 0.8);
  for (int16_t x : out.voxels) {
    CHECK(x >= *mn);
    CHECK(x <= *mx);
  }
}

TEST_CASE("resample: constant volume survives a round trip exactly") {
  CtVolume v;
  v.dims = {5, 6, 7};
  v.spacing = {2.0, 1.0, 1.5};
  v.voxels.assign(5 * 6 * 7, 123);
  CtVolume down = resample_isotropic(v, 1.0);
  for (int16_t x : down.voxels) CHECK(x == 123);
  // back to an anisotropic grid is out of scope; a second isotropic pass
  // must also stay constant
  CtVolume up = resample_isotropic(down, 2.0);
  for (int16_t x : up.voxels) CHECK(x == 123);
}

TEST_CASE("resample: physical extent changes by less than one target voxel") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    CtVolume v;
    v.dims = {2 + static_cast<int>(rng.uniform_int(40)),
              2 + static_cast<int>(rng.uniform_int(40)),
              2 + static_cast<int>(rng.uniform_int(40))};
    v.spacing = {rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0)};
    v.voxels.assign(static_cast<size_t>(v.dims[0]) * v.dims[1] * v.dims[2], 0);
    double target = rng.uniform(0.5, 2.0);
    CtVolume out = resample_isotropic(v, target);
    for (int a = 0; a < 3; ++a) {
      double in_extent = v.dims[a] * v.spacing[a];
      double out_extent = out.dims[a] * target;
      CHECK(std::abs(in_extent - out_extent) < target);
    }
  }
}

TEST_CASE("resample: rejects non-positive target") {
  CtVolume v;
  v.dims = {1, 1, 1};
  v.spacing = {1, 1, 1};
  v.voxels = {0};
  CHECK_THROWS_AS(resample_isotropic(v, 0.0), Error);
  CHECK_THROWS_AS(resample_isotropic(v, -1.0), Error);
}

TEST_CASE("gray volume io round-trip") {
  auto dir = make_temp_dir("gray_rt");
  GrayVolume g;
  g.dims = {2, 3, 4};
  g.spacing = {1, 1, 1};
  Rng rng(8);
  g.voxels.resize(24);
  for (auto& v : g.voxels) v = static_cast<uint8_t>(rng.uniform_int(256));
  std::string header = (dir / "roi.vol").string();
  write_gray_volume(g, header);
  GrayVolume back = read_gray_volume(header);
  CHECK(back.voxels == g.voxels);
  CHECK(back.dims == g.dims);
}

}  // TEST_SUITE
