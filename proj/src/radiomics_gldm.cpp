#include <algorithm>
#include <cmath>

#include "radiomics_common.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

// Dependence of a voxel: 1 (itself) plus the number of neighbors within
// Chebyshev distance `distance` whose level matches exactly (alpha = 0).
CountMatrix gldm_counts(const DiscreteStack& d, int distance) {
  const int nz = d.dims[0], ny = d.dims[1], nx = d.dims[2];
  const int r = distance;
  const int side = 2 * r + 1;
  const int max_dep = side * side * side;  // includes the center voxel

  CountMatrix m(d.ng, max_dep);
  int seen_max = 1;
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const int level = d.at(z, y, x);
        int dep = 1;
        for (int dz = -r; dz <= r; ++dz) {
          int zz = z + dz;
          if (zz < 0 || zz >= nz) continue;
          for (int dy = -r; dy <= r; ++dy) {
            int yy = y + dy;
            if (yy < 0 || yy >= ny) continue;
            for (int dx = -r; dx <= r; ++dx) {
              if (dz == 0 && dy == 0 && dx == 0) continue;
              int xx = x + dx;
              if (xx < 0 || xx >= nx) continue;
              if (d.at(zz, yy, xx) == level) ++dep;
            }
          }
        }
        m.at(level, dep)++;
        seen_max = std::max(seen_max, dep);
      }
    }
  }
  // trim to the largest observed dependence
  CountMatrix out(d.ng, seen_max);
  for (int i = 1; i <= d.ng; ++i)
    for (int j = 1; j <= seen_max; ++j) out.at(i, j) = m.at(i, j);
  return out;
}

NamedValues gldm_features(const DiscreteStack& d, const ExtractionParams& p) {
  CountMatrix m = gldm_counts(d, p.distance);
  const int ng = m.rows, nd = m.cols;
  const double nz = static_cast<double>(m.total());  // == voxel count

  std::vector<double> row_sum(ng + 1, 0.0), col_sum(nd + 1, 0.0);
  double sde = 0, lde = 0, lgl = 0, hgl = 0, sdlgl = 0, sdhgl = 0, ldlgl = 0,
         ldhgl = 0, entropy = 0, mu_i = 0, mu_j = 0;
  for (int i = 1; i <= ng; ++i) {
    for (int j = 1; j <= nd; ++j) {
      int64_t c = m.at(i, j);
      if (c == 0) continue;
      double cnt = static_cast<double>(c);
      double prob = cnt / nz;
      row_sum[i] += cnt;
      col_sum[j] += cnt;
      double i2 = static_cast<double>(i) * i, j2 = static_cast<double>(j) * j;
      sde += cnt / j2;
      lde += cnt * j2;
      lgl += cnt / i2;
      hgl += cnt * i2;
      sdlgl += cnt / (i2 * j2);
      sdhgl += cnt * i2 / j2;
      ldlgl += cnt * j2 / i2;
      ldhgl += cnt * i2 * j2;
      entropy += detail::entropy_term(prob);
      mu_i += prob * i;
      mu_j += prob * j;
    }
  }
  double glnu = 0.0;
  for (int i = 1; i <= ng; ++i) glnu += row_sum[i] * row_sum[i];
  double dnu = 0.0;
  for (int j = 1; j <= nd; ++j) dnu += col_sum[j] * col_sum[j];

  double var_i = 0.0, var_j = 0.0;
  for (int i = 1; i <= ng; ++i) {
    for (int j = 1; j <= nd; ++j) {
      int64_t c = m.at(i, j);
      if (c == 0) continue;
      double prob = c / nz;
      var_i += detail::sq(i - mu_i) * prob;
      var_j += detail::sq(j - mu_j) * prob;
    }
  }

  return {
      {"DependenceEntropy", entropy},
      {"DependenceNonUniformity", dnu / nz},
      {"DependenceNonUniformityNormalized", dnu / (nz * nz)},
      {"DependenceVariance", var_j},
      {"GrayLevelNonUniformity", glnu / nz},
      {"GrayLevelVariance", var_i},
      {"HighGrayLevelEmphasis", hgl / nz},
      {"LargeDependenceEmphasis", lde / nz},
      {"LargeDependenceHighGrayLevelEmphasis", ldhgl / nz},
      {"LargeDependenceLowGrayLevelEmphasis", ldlgl / nz},
      {"LowGrayLevelEmphasis", lgl / nz},
      {"SmallDependenceEmphasis", sde / nz},
      {"SmallDependenceHighGrayLevelEmphasis", sdhgl / nz},
      {"SmallDependenceLowGrayLevelEmphasis", sdlgl / nz},
  };
}

}  // namespace radpipe
