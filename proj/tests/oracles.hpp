#pragma once

// Independent brute-force reference implementations used to verify the
// radiomics library. These deliberately use different algorithms from the
// production code (exhaustive pair scans, union-find zones, per-definition
// run checks) and must stay decoupled from it: they may share only the
// DiscreteStack plain-data type.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radpipe/radiomics.hpp"

namespace oracle {

using Mat = std::vector<std::vector<int64_t>>;  // [level-1][second-1]

// Symmetric co-occurrence counts via an O(n^2) scan over ordered voxel pairs.
Mat glcm_pairs(const radpipe::DiscreteStack& d, const std::array<int, 3>& offset);

// Run counts by checking the maximal-run definition at every (start, level,
// length) combination.
Mat glrlm_runs(const radpipe::DiscreteStack& d, const std::array<int, 3>& dir);

// Zone counts via union-find over same-level 26-neighbor pairs.
Mat glszm_zones(const radpipe::DiscreteStack& d);

// Dependence counts via an O(n^2) Chebyshev-ball pair scan.
Mat gldm_dependence(const radpipe::DiscreteStack& d, int distance);

struct Ngtdm {
  std::vector<int64_t> n;  // [level-1]
  std::vector<double> s;
};
Ngtdm ngtdm(const radpipe::DiscreteStack& d, int distance);

// Textbook feature formulas evaluated on the oracle matrices.
std::map<std::string, double> glcm_features(const Mat& m, int ng);
std::map<std::string, double> glrlm_features(const Mat& m, int64_t n_voxels);
std::map<std::string, double> glszm_features(const Mat& m, int64_t n_voxels);
std::map<std::string, double> gldm_features(const Mat& m);
std::map<std::string, double> ngtdm_features(const Ngtdm& t, int ng);

// Direction-averaged gray-level families, matching the library's public
// contract (13 directions, 4 in-plane for single-slice stacks).
std::map<std::string, double> glcm_features_averaged(const radpipe::DiscreteStack& d,
                                                     int distance);
std::map<std::string, double> glrlm_features_averaged(const radpipe::DiscreteStack& d);

// First-order statistics from a sorted copy of the raw values.
std::map<std::string, double> first_order(const std::vector<uint8_t>& values,
                                          const std::array<double, 3>& spacing,
                                          double bin_width);

// Mann-Whitney AUC by O(n^2) pair counting with half credit for ties.
double auc_pair_count(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace oracle
