#include <algorithm>
#include <cmath>

#include "radpipe/error.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

int64_t CountMatrix::total() const {
  int64_t t = 0;
  for (int64_t c : counts) t += c;
  return t;
}

DiscreteStack discretize(const GrayVolume& stack, const ExtractionParams& p) {
  if (stack.voxels.empty())
    fail(ErrorCode::BadArgument, "discretize: empty stack");
  const bool count_mode = p.bin_count != 0;
  if (count_mode && p.bin_count < 2)
    fail(ErrorCode::BadArgument, "discretize: bin_count must be >= 2");
  if (!count_mode && !(p.bin_width > 0.0))
    fail(ErrorCode::BadArgument, "discretize: bin_width must be positive");

  auto [mn_it, mx_it] = std::minmax_element(stack.voxels.begin(), stack.voxels.end());
  const int mn = *mn_it, mx = *mx_it;

  DiscreteStack out;
  out.dims = stack.dims;
  out.spacing = stack.spacing;
  out.levels.resize(stack.voxels.size());

  // Tiny level lookup: gray values are 0..255.
  int lut[256];
  if (mn == mx) {
    for (int v = mn; v <= mx; ++v) lut[v] = 1;
  } else if (count_mode) {
    double w = static_cast<double>(mx - mn) / p.bin_count;
    for (int v = mn; v <= mx; ++v) {
      int level = static_cast<int>(std::floor((v - mn) / w)) + 1;
      lut[v] = std::min(level, p.bin_count);
    }
  } else {
    for (int v = mn; v <= mx; ++v)
      lut[v] = static_cast<int>(std::floor((v - mn) / p.bin_width)) + 1;
  }

  int ng = 1;
  for (size_t i = 0; i < stack.voxels.size(); ++i) {
    int level = lut[stack.voxels[i]];
    out.levels[i] = level;
    ng = std::max(ng, level);
  }
  out.ng = ng;
  return out;
}

}  // namespace radpipe
