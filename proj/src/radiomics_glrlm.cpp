#include <algorithm>
#include <cmath>

#include "radiomics_common.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

CountMatrix glrlm_counts(const DiscreteStack& d, const std::array<int, 3>& direction) {
  const int nz = d.dims[0], ny = d.dims[1], nx = d.dims[2];
  const int dz = direction[0], dy = direction[1], dx = direction[2];
  const int max_run = std::max({nz, ny, nx});
  CountMatrix m(d.ng, max_run);

  auto in_bounds = [&](int z, int y, int x) {
    return z >= 0 && z < nz && y >= 0 && y < ny && x >= 0 && x < nx;
  };

  int longest = 1;
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        int level = d.at(z, y, x);
        // a run starts where the previous voxel along the direction differs
        int pz = z - dz, py = y - dy, px = x - dx;
        if (in_bounds(pz, py, px) && d.at(pz, py, px) == level) continue;
        int len = 1;
        int cz = z + dz, cy = y + dy, cx = x + dx;
        while (in_bounds(cz, cy, cx) && d.at(cz, cy, cx) == level) {
          ++len;
          cz += dz;
          cy += dy;
          cx += dx;
        }
        m.at(level, len)++;
        longest = std::max(longest, len);
      }
    }
  }
  m.cols = longest;  // trim trailing empty columns
  std::vector<int64_t> trimmed(static_cast<size_t>(d.ng) * longest);
  for (int i = 0; i < d.ng; ++i)
    for (int j = 0; j < longest; ++j)
      trimmed[static_cast<size_t>(i) * longest + j] =
          m.counts[static_cast<size_t>(i) * max_run + j];
  m.counts = std::move(trimmed);
  return m;
}

namespace {

NamedValues glrlm_features_from_counts(const CountMatrix& m, int64_t n_voxels) {
  const int ng = m.rows, nl = m.cols;
  const double nr = static_cast<double>(m.total());

  std::vector<double> row_sum(ng + 1, 0.0), col_sum(nl + 1, 0.0);
  double sre = 0, lre = 0, lgl = 0, hgl = 0, srlgl = 0, srhgl = 0, lrlgl = 0,
         lrhgl = 0, entropy = 0, mu_i = 0, mu_l = 0;
  for (int i = 1; i <= ng; ++i) {
    for (int l = 1; l <= nl; ++l) {
      int64_t c = m.at(i, l);
      if (c == 0) continue;
      double cnt = static_cast<double>(c);
      double p = cnt / nr;
      row_sum[i] += cnt;
      col_sum[l] += cnt;
      double i2 = static_cast<double>(i) * i, l2 = static_cast<double>(l) * l;
      sre += cnt / l2;
      lre += cnt * l2;
      lgl += cnt / i2;
      hgl += cnt * i2;
      srlgl += cnt / (i2 * l2);
      srhgl += cnt * i2 / l2;
      lrlgl += cnt * l2 / i2;
      lrhgl += cnt * i2 * l2;
      entropy += detail::entropy_term(p);
      mu_i += p * i;
      mu_l += p * l;
    }
  }
  double glnu = 0.0;
  for (int i = 1; i <= ng; ++i) glnu += row_sum[i] * row_sum[i];
  double rlnu = 0.0;
  for (int l = 1; l <= nl; ++l) rlnu += col_sum[l] * col_sum[l];

  double var_i = 0.0, var_l = 0.0;
  for (int i = 1; i <= ng; ++i) {
    for (int l = 1; l <= nl; ++l) {
      int64_t c = m.at(i, l);
      if (c == 0) continue;
      double p = c / nr;
      var_i += detail::sq(i - mu_i) * p;
      var_l += detail::sq(l - mu_l) * p;
    }
  }

  return {
      {"GrayLevelNonUniformity", glnu / nr},
      {"GrayLevelNonUniformityNormalized", glnu / (nr * nr)},
      {"GrayLevelVariance", var_i},
      {"HighGrayLevelRunEmphasis", hgl / nr},
      {"LongRunEmphasis", lre / nr},
      {"LongRunHighGrayLevelEmphasis", lrhgl / nr},
      {"LongRunLowGrayLevelEmphasis", lrlgl / nr},
      {"LowGrayLevelRunEmphasis", lgl / nr},
      {"RunEntropy", entropy},
      {"RunLengthNonUniformity", rlnu / nr},
      {"RunLengthNonUniformityNormalized", rlnu / (nr * nr)},
      {"RunPercentage", nr / static_cast<double>(n_voxels)},
      {"RunVariance", var_l},
      {"ShortRunEmphasis", sre / nr},
      {"ShortRunHighGrayLevelEmphasis", srhgl / nr},
      {"ShortRunLowGrayLevelEmphasis", srlgl / nr},
  };
}

}  // namespace

NamedValues glrlm_features(const DiscreteStack& d, const ExtractionParams&) {
  // Runs always use unit steps along each direction; every voxel belongs to
  // exactly one maximal run per direction, so no direction is ever empty.
  auto dirs = glcm_directions(d.dims);
  const int64_t n_voxels = static_cast<int64_t>(d.levels.size());
  NamedValues acc;
  for (const auto& dir : dirs) {
    CountMatrix m = glrlm_counts(d, dir);
    NamedValues f = glrlm_features_from_counts(m, n_voxels);
    if (acc.empty()) {
      acc = std::move(f);
    } else {
      for (size_t i = 0; i < acc.size(); ++i) acc[i].second += f[i].second;
    }
  }
  for (auto& kv : acc) kv.second /= static_cast<double>(dirs.size());
  return acc;
}

}  // namespace radpipe
