#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radpipe/volume.hpp"

// IBSI-style radiomics features over a cuboid ROI stack: 18 first-order,
// 14 shape, 24 GLCM, 14 GLDM, 16 GLRLM, 16 GLSZM, 5 NGTDM = 107 features.
//
// Conventions (fixed across the pipeline and its verification oracles):
//   - discretized levels run 1..Ng with Ng = the maximum assigned level;
//     interior bins may be empty and contribute zero weight
//   - 3D direction set: the 13 offsets unique up to sign; single-slice
//     stacks use the 4 in-plane offsets; directional families (GLCM, GLRLM)
//     average their features arithmetically over directions
//   - zones use 26-connectivity, dependence and gray-tone neighborhoods use
//     Chebyshev distance d
//   - logarithms are base 2 and only ever taken of strictly positive
//     probabilities; degenerate inputs therefore yield exact 0 entropies
//   - degenerate definitions: zero-variance Correlation and MCC are 1,
//     Imc1/Imc2 are 0, Skewness/Kurtosis of a constant distribution are 0,
//     NGTDM Coarseness is capped at 1e6 when its denominator vanishes

namespace radpipe {

struct ExtractionParams {
  double bin_width = 25.0;  // gray levels per bin (fixed-bin-width mode)
  int bin_count = 0;        // >= 2 switches to fixed-bin-count mode
  int distance = 1;         // offset distance for texture matrices
};

struct DiscreteStack {
  std::array<int, 3> dims{0, 0, 0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::vector<int> levels;  // values in 1..ng
  int ng = 1;

  int at(int z, int y, int x) const {
    return levels[(static_cast<size_t>(z) * dims[1] + y) * dims[2] + x];
  }
};

using NamedValues = std::vector<std::pair<std::string, double>>;

enum class FeatureFamily { FirstOrder, Shape, Glcm, Gldm, Glrlm, Glszm, Ngtdm };

struct FeatureVector {
  NamedValues items;  // canonical order, 107 entries

  double at(const std::string& name) const;
  size_t size() const { return items.size(); }
};

// Canonical feature names ("family_Name"), in extract_all output order:
// families in fixed order, names alphabetical within each family.
const std::vector<std::string>& canonical_feature_names();

DiscreteStack discretize(const GrayVolume& stack, const ExtractionParams& p);

NamedValues first_order_features(const GrayVolume& stack, const ExtractionParams& p);
NamedValues shape_features(const std::array<int, 3>& dims,
                           const std::array<double, 3>& spacing);
NamedValues glcm_features(const DiscreteStack& d, const ExtractionParams& p);
NamedValues glrlm_features(const DiscreteStack& d, const ExtractionParams& p);
NamedValues glszm_features(const DiscreteStack& d, const ExtractionParams& p);
NamedValues gldm_features(const DiscreteStack& d, const ExtractionParams& p);
NamedValues ngtdm_features(const DiscreteStack& d, const ExtractionParams& p);

FeatureVector extract_all(const GrayVolume& stack, const ExtractionParams& p);

// ---- matrix-level API, exposed so independent enumerators can verify the
// ---- construction exactly

// Count matrix with 1-based semantic indices: rows are gray levels 1..rows,
// columns are the family's second index (level, run length, zone size or
// dependence) 1..cols.
struct CountMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int64_t> counts;

  CountMatrix() = default;
  CountMatrix(int r, int c) : rows(r), cols(c), counts(static_cast<size_t>(r) * c, 0) {}

  int64_t at(int i, int j) const {
    return counts[static_cast<size_t>(i - 1) * cols + (j - 1)];
  }
  int64_t& at(int i, int j) {
    return counts[static_cast<size_t>(i - 1) * cols + (j - 1)];
  }
  int64_t total() const;
};

// The 13 unique-to-sign 3D offsets (z, y, x); single-slice stacks fall back
// to the 4 in-plane offsets.
std::vector<std::array<int, 3>> glcm_directions(const std::array<int, 3>& dims);

CountMatrix glcm_counts(const DiscreteStack& d, const std::array<int, 3>& offset);
CountMatrix glrlm_counts(const DiscreteStack& d, const std::array<int, 3>& direction);
CountMatrix glszm_counts(const DiscreteStack& d);
CountMatrix gldm_counts(const DiscreteStack& d, int distance);

struct NgtdmTable {
  std::vector<int64_t> n;  // index 0 unused; n[i] voxels of level i
  std::vector<double> s;   // s[i] = sum over those voxels of |i - mean(neighbors)|
};
NgtdmTable ngtdm_table(const DiscreteStack& d, int distance);

// Per-direction GLCM features from a single symmetric count matrix.
NamedValues glcm_features_from_counts(const CountMatrix& m, int ng);

}  // namespace radpipe
