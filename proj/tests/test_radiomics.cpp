#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "radpipe/radiomics.hpp"
#include "radpipe/rng.hpp"
#include "test_support.hpp"

using namespace radpipe;
using testsup::close_rel;

namespace {

void check_matrix_equal(const CountMatrix& lib, const oracle::Mat& ref,
                        const char* what) {
  INFO(what);
  REQUIRE(static_cast<size_t>(lib.rows) == ref.size());
  int ref_cols = static_cast<int>(ref[0].size());
  int cols = std::max(lib.cols, ref_cols);
  for (int i = 1; i <= lib.rows; ++i) {
    for (int j = 1; j <= cols; ++j) {
      int64_t a = j <= lib.cols ? lib.at(i, j) : 0;
      int64_t b = j <= ref_cols ? ref[i - 1][j - 1] : 0;
      INFO("entry (", i, ",", j, ")");
      CHECK(a == b);
    }
  }
}

void check_features_match(const NamedValues& lib,
                          const std::map<std::string, double>& ref, const char* what) {
  INFO(what);
  REQUIRE(lib.size() == ref.size());
  for (const auto& [name, value] : lib) {
    auto it = ref.find(name);
    REQUIRE(it != ref.end());
    INFO("feature ", name, ": lib=", value, " oracle=", it->second);
    CHECK(close_rel(value, it->second));
  }
}

}  // namespace

TEST_SUITE("radiomics") {

TEST_CASE("discretize: constant stack collapses to one level") {
  auto stack = testsup::constant_stack(3, 3, 3, 77);
  auto d = discretize(stack, {});
  CHECK(d.ng == 1);
  for (int level : d.levels) CHECK(level == 1);
}

TEST_CASE("discretize: bin width 25 maps {0,25,50} to levels {1,2,3}") {
  GrayVolume v;
  v.dims = {1, 1, 3};
  v.spacing = {1, 1, 1};
  v.voxels = {0, 25, 50};
  auto d = discretize(v, {});
  CHECK(d.levels == std::vector<int>{1, 2, 3});
  CHECK(d.ng == 3);
}

TEST_CASE("discretize: histogram matches per-voxel brute-force binning") {
  Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    GrayVolume v;
    v.dims = {4, 5, 6};
    v.spacing = {1, 1, 1};
    v.voxels.resize(120);
    for (auto& px : v.voxels) px = static_cast<uint8_t>(rng.uniform_int(256));
    auto d = discretize(v, {});
    uint8_t mn = *std::min_element(v.voxels.begin(), v.voxels.end());
    for (size_t i = 0; i < v.voxels.size(); ++i) {
      int expected = static_cast<int>((v.voxels[i] - mn) / 25.0) + 1;
      CHECK(d.levels[i] == expected);
    }
  }
}

TEST_CASE("first order: degenerate and tiny examples") {
  SUBCASE("constant stack") {
    auto stack = testsup::constant_stack(2, 3, 4, 9);
    auto f = first_order_features(stack, {});
    std::map<std::string, double> m(f.begin(), f.end());
    CHECK(m["Variance"] == 0.0);
    CHECK(m["Range"] == 0.0);
    CHECK(m["Entropy"] == 0.0);
    CHECK(m["Uniformity"] == 1.0);
    CHECK(m["Energy"] == 24.0 * 81.0);
    CHECK(m["Skewness"] == 0.0);
    CHECK(m["Kurtosis"] == 0.0);
  }
  SUBCASE("two voxels {0, 10}") {
    GrayVolume v;
    v.dims = {1, 1, 2};
    v.spacing = {1, 1, 1};
    v.voxels = {0, 10};
    auto f = first_order_features(v, {});
    std::map<std::string, double> m(f.begin(), f.end());
    CHECK(m["Mean"] == 5.0);
    CHECK(m["Variance"] == 25.0);
    CHECK(m["Range"] == 10.0);
  }
}

TEST_CASE("first order: random stacks match the sorted-values oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto stack = testsup::random_stack(rng, 5, 5, 5, 8);
    auto lib = first_order_features(stack, {});
    auto ref = oracle::first_order(stack.voxels, stack.spacing, 25.0);
    check_features_match(lib, ref, "first_order vs oracle");
  }
}

TEST_CASE("first order: variance identity") {
  Rng rng(11);
  auto stack = testsup::random_stack(rng, 6, 6, 6, 10);
  auto f = first_order_features(stack, {});
  std::map<std::string, double> m(f.begin(), f.end());
  double mean_sq = m["RootMeanSquared"] * m["RootMeanSquared"];
  CHECK(close_rel(m["Variance"], mean_sq - m["Mean"] * m["Mean"]));
}

TEST_CASE("shape: unit cube and cuboid closed forms") {
  SUBCASE("single 1mm voxel") {
    auto f = shape_features({1, 1, 1}, {1.0, 1.0, 1.0});
    std::map<std::string, double> m(f.begin(), f.end());
    CHECK(m["VoxelVolume"] == doctest::Approx(1.0));
    CHECK(m["SurfaceArea"] == doctest::Approx(6.0));
    CHECK(m["MeshVolume"] == doctest::Approx(1.0));
  }
  SUBCASE("cuboid diagonal") {
    // 2 x 3 x 5 voxels at (1.5, 2.0, 0.5) mm -> extents 3 x 6 x 2.5 mm
    auto f = shape_features({2, 3, 5}, {1.5, 2.0, 0.5});
    std::map<std::string, double> m(f.begin(), f.end());
    double a = 3.0, b = 6.0, c = 2.5;
    CHECK(m["Maximum3DDiameter"] == doctest::Approx(std::sqrt(a * a + b * b + c * c)));
    CHECK(m["Maximum2DDiameterSlice"] == doctest::Approx(std::sqrt(b * b + c * c)));
    CHECK(m["Maximum2DDiameterColumn"] == doctest::Approx(std::sqrt(a * a + b * b)));
    CHECK(m["Maximum2DDiameterRow"] == doctest::Approx(std::sqrt(a * a + c * c)));
    CHECK(m["VoxelVolume"] == doctest::Approx(a * b * c));
    CHECK(m["SurfaceArea"] == doctest::Approx(2 * (a * b + a * c + b * c)));
    CHECK(m["SurfaceVolumeRatio"] == doctest::Approx(2 * (a * b + a * c + b * c) / (a * b * c)));
  }
  SUBCASE("128x128xS crop at 1mm") {
    const int S = 7;
    auto f = shape_features({S, 128, 128}, {1.0, 1.0, 1.0});
    std::map<std::string, double> m(f.begin(), f.end());
    double v = 128.0 * 128.0 * S;
    double sa = 2 * (128.0 * 128.0 + 2 * 128.0 * S);
    CHECK(m["VoxelVolume"] == doctest::Approx(v));
    CHECK(m["SurfaceArea"] == doctest::Approx(sa));
    CHECK(m["Sphericity"] == doctest::Approx(std::cbrt(36 * 3.14159265358979 * v * v) / sa));
    // principal axes: major along y/x (tie), least along z
    double lam_inplane = (128.0 * 128.0 - 1) / 12.0;
    double lam_z = (S * S - 1.0) / 12.0;
    CHECK(m["MajorAxisLength"] == doctest::Approx(4 * std::sqrt(lam_inplane)));
    CHECK(m["LeastAxisLength"] == doctest::Approx(4 * std::sqrt(lam_z)));
    CHECK(m["Elongation"] == doctest::Approx(1.0));
    CHECK(m["Flatness"] == doctest::Approx(std::sqrt(lam_z / lam_inplane)));
  }
}

TEST_CASE("glcm: hand-checked 3x3 horizontal contrast is 0.5") {
  // levels [[1,1,2],[1,2,2],[2,2,3]]
  auto d = testsup::make_discrete(1, 3, 3, {1, 1, 2, 1, 2, 2, 2, 2, 3});
  CountMatrix m = glcm_counts(d, {0, 0, 1});
  CHECK(m.total() == 12);  // 6 horizontal pairs, both orders
  auto f = glcm_features_from_counts(m, d.ng);
  std::map<std::string, double> fm(f.begin(), f.end());
  CHECK(fm["Contrast"] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("glcm: constant stack degenerates cleanly") {
  auto stack = testsup::constant_stack(3, 3, 3, 50);
  auto d = discretize(stack, {});
  auto f = glcm_features(d, {});
  std::map<std::string, double> m(f.begin(), f.end());
  CHECK(m["Contrast"] == 0.0);
  CHECK(m["MaximumProbability"] == 1.0);
  CHECK(m["JointEntropy"] == 0.0);
  CHECK(m["Correlation"] == 1.0);
  CHECK(m["MCC"] == 1.0);
}

TEST_CASE("glcm: normalized matrix sums to one") {
  Rng rng(3);
  auto stack = testsup::random_stack(rng, 4, 4, 4, 4);
  auto d = discretize(stack, {});
  for (const auto& dir : glcm_directions(d.dims)) {
    CountMatrix m = glcm_counts(d, dir);
    int64_t total = m.total();
    REQUIRE(total > 0);
    double sum = 0.0;
    for (int i = 1; i <= m.rows; ++i)
      for (int j = 1; j <= m.cols; ++j)
        sum += static_cast<double>(m.at(i, j)) / static_cast<double>(total);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("gray-level families: random stacks match brute-force oracles") {
  Rng rng(1234);
  ExtractionParams p;
  for (int trial = 0; trial < 8; ++trial) {
    int nz = 2 + static_cast<int>(rng.uniform_int(5));
    int ny = 2 + static_cast<int>(rng.uniform_int(5));
    int nx = 2 + static_cast<int>(rng.uniform_int(5));
    int levels = 2 + static_cast<int>(rng.uniform_int(4));
    auto stack = testsup::random_stack(rng, nz, ny, nx, levels);
    auto d = discretize(stack, p);

    for (const auto& dir : glcm_directions(d.dims)) {
      check_matrix_equal(glcm_counts(d, dir), oracle::glcm_pairs(d, dir), "glcm counts");
      check_matrix_equal(glrlm_counts(d, dir), oracle::glrlm_runs(d, dir), "glrlm counts");
    }
    check_matrix_equal(glszm_counts(d), oracle::glszm_zones(d), "glszm counts");
    check_matrix_equal(gldm_counts(d, 1), oracle::gldm_dependence(d, 1), "gldm counts");

    auto nt_lib = ngtdm_table(d, 1);
    auto nt_ref = oracle::ngtdm(d, 1);
    for (int i = 1; i <= d.ng; ++i) {
      CHECK(nt_lib.n[i] == nt_ref.n[i - 1]);
      CHECK(close_rel(nt_lib.s[i], nt_ref.s[i - 1]));
    }

    check_features_match(glcm_features(d, p), oracle::glcm_features_averaged(d, 1),
                         "glcm features");
    check_features_match(glrlm_features(d, p), oracle::glrlm_features_averaged(d),
                         "glrlm features");
    check_features_match(glszm_features(d, p),
                         oracle::glszm_features(oracle::glszm_zones(d),
                                                static_cast<int64_t>(d.levels.size())),
                         "glszm features");
    check_features_match(gldm_features(d, p),
                         oracle::gldm_features(oracle::gldm_dependence(d, 1)),
                         "gldm features");
    check_features_match(ngtdm_features(d, p), oracle::ngtdm_features(nt_ref, d.ng),
                         "ngtdm features");
  }
}

TEST_CASE("glrlm: manual run enumeration for a 1D-style row") {
  // single-slice 1x1x5 stack with levels 1,1,2,2,2
  auto d = testsup::make_discrete(1, 1, 5, {1, 1, 2, 2, 2});
  CountMatrix m = glrlm_counts(d, {0, 0, 1});
  CHECK(m.at(1, 2) == 1);
  CHECK(m.at(2, 3) == 1);
  CHECK(m.total() == 2);
}

TEST_CASE("constant 3x3x3: glrlm/glszm/ngtdm degenerate geometry") {
  auto stack = testsup::constant_stack(3, 3, 3, 100);
  auto d = discretize(stack, {});

  // single zone of 27 voxels
  CountMatrix z = glszm_counts(d);
  CHECK(z.total() == 1);
  CHECK(z.at(1, 27) == 1);

  // every run is maximal for the geometry: along each direction the run
  // lengths sum to 27 and LongRunEmphasis hits the geometric maximum
  auto f = glrlm_features(d, {});
  std::map<std::string, double> fm(f.begin(), f.end());
  double lre_expected = 0.0;
  auto dirs = glcm_directions(d.dims);
  for (const auto& dir : dirs) {
    CountMatrix m = glrlm_counts(d, dir);
    double nr = static_cast<double>(m.total());
    double acc = 0.0;
    for (int l = 1; l <= m.cols; ++l)
      acc += static_cast<double>(m.at(1, l)) * l * l;
    lre_expected += acc / nr;
  }
  lre_expected /= static_cast<double>(dirs.size());
  CHECK(close_rel(fm["LongRunEmphasis"], lre_expected));

  auto nf = ngtdm_features(d, {});
  std::map<std::string, double> nm(nf.begin(), nf.end());
  CHECK(nm["Contrast"] == 0.0);
}

TEST_CASE("extract_all: 107 canonical features, family counts per taxonomy") {
  Rng rng(5);
  auto stack = testsup::random_stack(rng, 4, 6, 6, 6);
  auto fv = extract_all(stack, {});
  REQUIRE(fv.size() == 107);

  std::map<std::string, int> family_counts;
  for (const auto& [name, value] : fv.items) {
    family_counts[name.substr(0, name.find('_'))]++;
    CHECK(std::isfinite(value));
  }
  CHECK(family_counts["firstorder"] == 18);
  CHECK(family_counts["shape"] == 14);
  CHECK(family_counts["glcm"] == 24);
  CHECK(family_counts["gldm"] == 14);
  CHECK(family_counts["glrlm"] == 16);
  CHECK(family_counts["glszm"] == 16);
  CHECK(family_counts["ngtdm"] == 5);

  // names are canonical: family blocks in fixed order, alphabetical inside
  CHECK(fv.items.size() == canonical_feature_names().size());
  for (size_t i = 0; i < fv.items.size(); ++i)
    CHECK(fv.items[i].first == canonical_feature_names()[i]);
}

TEST_CASE("extract_all: degenerate stacks are NaN/Inf free") {
  ExtractionParams p;
  SUBCASE("constant stack") {
    auto fv = extract_all(testsup::constant_stack(3, 4, 5, 128), p);
    for (const auto& [name, value] : fv.items) {
      INFO(name);
      CHECK(std::isfinite(value));
    }
  }
  SUBCASE("single voxel") {
    auto fv = extract_all(testsup::constant_stack(1, 1, 1, 9), p);
    for (const auto& [name, value] : fv.items) {
      INFO(name);
      CHECK(std::isfinite(value));
    }
  }
  SUBCASE("single slice") {
    Rng rng(9);
    auto fv = extract_all(testsup::random_stack(rng, 1, 8, 8, 5), p);
    for (const auto& [name, value] : fv.items) {
      INFO(name);
      CHECK(std::isfinite(value));
    }
  }
}

TEST_CASE("extract_all: deterministic across repeated runs") {
  Rng rng(31);
  auto stack = testsup::random_stack(rng, 3, 7, 7, 6);
  auto a = extract_all(stack, {});
  auto b = extract_all(stack, {});
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.items.size(); ++i) {
    CHECK(a.items[i].first == b.items[i].first);
    CHECK(a.items[i].second == b.items[i].second);
  }
}

TEST_CASE("invariant: in-plane 90 degree rotation preserves averaged GLCM features") {
  Rng rng(77);
  for (int trial = 0; trial < 3; ++trial) {
    auto stack = testsup::random_stack(rng, 3, 5, 5, 5);
    // rotate each slice 90 degrees in-plane: (y, x) -> (x, ny-1-y)
    GrayVolume rot;
    rot.dims = {stack.dims[0], stack.dims[2], stack.dims[1]};
    rot.spacing = stack.spacing;
    rot.voxels.resize(stack.voxels.size());
    for (int z = 0; z < stack.dims[0]; ++z)
      for (int y = 0; y < stack.dims[1]; ++y)
        for (int x = 0; x < stack.dims[2]; ++x)
          rot.voxels[(static_cast<size_t>(z) * rot.dims[1] + x) * rot.dims[2] +
                     (stack.dims[1] - 1 - y)] = stack.at(z, y, x);

    auto fa = glcm_features(discretize(stack, {}), {});
    auto fb = glcm_features(discretize(rot, {}), {});
    for (size_t i = 0; i < fa.size(); ++i) {
      INFO(fa[i].first);
      CHECK(close_rel(fa[i].second, fb[i].second));
    }
  }
}

TEST_CASE("invariant: constant shift leaves all 75 gray-level features unchanged") {
  Rng rng(13);
  auto stack = testsup::random_stack(rng, 4, 5, 5, 6);
  for (auto& v : stack.voxels) v = static_cast<uint8_t>(std::min(200, int(v)));
  GrayVolume shifted = stack;
  for (auto& v : shifted.voxels) v = static_cast<uint8_t>(v + 30);

  ExtractionParams p;
  auto fa = extract_all(stack, p);
  auto fb = extract_all(shifted, p);
  for (size_t i = 0; i < fa.items.size(); ++i) {
    const auto& name = fa.items[i].first;
    if (name.rfind("glcm_", 0) == 0 || name.rfind("gldm_", 0) == 0 ||
        name.rfind("glrlm_", 0) == 0 || name.rfind("glszm_", 0) == 0 ||
        name.rfind("ngtdm_", 0) == 0) {
      INFO(name);
      CHECK(fa.items[i].second == fb.items[i].second);
    }
  }
}

}  // TEST_SUITE
