#include <algorithm>
#include <cmath>

#include "radiomics_common.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

NgtdmTable ngtdm_table(const DiscreteStack& d, int distance) {
  const int nz = d.dims[0], ny = d.dims[1], nx = d.dims[2];
  const int r = distance;

  NgtdmTable t;
  t.n.assign(d.ng + 1, 0);
  t.s.assign(d.ng + 1, 0.0);

  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        int64_t sum = 0;
        int cnt = 0;
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
              sum += d.at(zz, yy, xx);
              ++cnt;
            }
          }
        }
        if (cnt == 0) continue;  // isolated voxel has no gray-tone neighborhood
        const int level = d.at(z, y, x);
        t.n[level]++;
        t.s[level] += std::abs(level - static_cast<double>(sum) / cnt);
      }
    }
  }
  return t;
}

NamedValues ngtdm_features(const DiscreteStack& d, const ExtractionParams& p) {
  NgtdmTable t = ngtdm_table(d, p.distance);
  const int ng = d.ng;

  int64_t nvp = 0;
  for (int i = 1; i <= ng; ++i) nvp += t.n[i];

  if (nvp == 0) {
    return {{"Busyness", 0.0}, {"Coarseness", 1e6}, {"Complexity", 0.0},
            {"Contrast", 0.0}, {"Strength", 0.0}};
  }

  std::vector<double> prob(ng + 1, 0.0);
  int ngp = 0;
  double s_total = 0.0, ps_total = 0.0;
  for (int i = 1; i <= ng; ++i) {
    prob[i] = static_cast<double>(t.n[i]) / nvp;
    if (t.n[i] > 0) ++ngp;
    s_total += t.s[i];
    ps_total += prob[i] * t.s[i];
  }

  const double coarseness = ps_total > detail::kDegenerateEps ? 1.0 / ps_total : 1e6;

  double contrast = 0.0;
  if (ngp > 1) {
    double pair_term = 0.0;
    for (int i = 1; i <= ng; ++i) {
      if (t.n[i] == 0) continue;
      for (int j = 1; j <= ng; ++j) {
        if (t.n[j] == 0) continue;
        pair_term += prob[i] * prob[j] * detail::sq(i - j);
      }
    }
    contrast = pair_term / (static_cast<double>(ngp) * (ngp - 1)) * (s_total / nvp);
  }

  double busy_denom = 0.0, complexity = 0.0, strength_num = 0.0;
  for (int i = 1; i <= ng; ++i) {
    if (t.n[i] == 0) continue;
    for (int j = 1; j <= ng; ++j) {
      if (t.n[j] == 0) continue;
      busy_denom += std::abs(i * prob[i] - j * prob[j]);
      complexity += std::abs(i - j) * (prob[i] * t.s[i] + prob[j] * t.s[j]) /
                    (prob[i] + prob[j]);
      strength_num += (prob[i] + prob[j]) * detail::sq(i - j);
    }
  }
  complexity /= static_cast<double>(nvp);
  const double busyness =
      busy_denom > detail::kDegenerateEps ? ps_total / busy_denom : 0.0;
  const double strength =
      s_total > detail::kDegenerateEps ? strength_num / s_total : 0.0;

  return {{"Busyness", busyness},
          {"Coarseness", coarseness},
          {"Complexity", complexity},
          {"Contrast", contrast},
          {"Strength", strength}};
}

}  // namespace radpipe
