#include <algorithm>
#include <cmath>
#include <cstdint>

#include "radiomics_common.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

namespace {

// Flood-fill zones of equal level under 26-connectivity; calls sink(level,
// size) once per zone. Iterative stack keeps large zones off the C++ stack.
template <typename Sink>
void for_each_zone(const DiscreteStack& d, Sink&& sink) {
  const int nz = d.dims[0], ny = d.dims[1], nx = d.dims[2];
  const size_t n = d.levels.size();
  std::vector<uint8_t> visited(n, 0);
  std::vector<int32_t> work;

  auto flat = [&](int z, int y, int x) {
    return (static_cast<size_t>(z) * ny + y) * nx + x;
  };

  for (size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    const int level = d.levels[start];
    visited[start] = 1;
    work.clear();
    work.push_back(static_cast<int32_t>(start));
    int64_t size = 0;
    while (!work.empty()) {
      size_t idx = static_cast<size_t>(work.back());
      work.pop_back();
      ++size;
      int z = static_cast<int>(idx / (static_cast<size_t>(ny) * nx));
      int rem = static_cast<int>(idx % (static_cast<size_t>(ny) * nx));
      int y = rem / nx, x = rem % nx;
      for (int dz = -1; dz <= 1; ++dz) {
        int zz = z + dz;
        if (zz < 0 || zz >= nz) continue;
        for (int dy = -1; dy <= 1; ++dy) {
          int yy = y + dy;
          if (yy < 0 || yy >= ny) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            int xx = x + dx;
            if (xx < 0 || xx >= nx) continue;
            size_t nb = flat(zz, yy, xx);
            if (visited[nb] || d.levels[nb] != level) continue;
            visited[nb] = 1;
            work.push_back(static_cast<int32_t>(nb));
          }
        }
      }
    }
    sink(level, size);
  }
}

}  // namespace

CountMatrix glszm_counts(const DiscreteStack& d) {
  int64_t max_size = 1;
  for_each_zone(d, [&](int, int64_t size) { max_size = std::max(max_size, size); });
  CountMatrix m(d.ng, static_cast<int>(max_size));
  for_each_zone(d, [&](int level, int64_t size) {
    m.at(level, static_cast<int>(size))++;
  });
  return m;
}

NamedValues glszm_features(const DiscreteStack& d, const ExtractionParams&) {
  // Sparse accumulation; zone sizes can reach the full stack and a dense
  // matrix would be needlessly large in the per-slice hot path.
  std::vector<std::pair<int, int64_t>> zones;  // (level, size)
  for_each_zone(d, [&](int level, int64_t size) { zones.emplace_back(level, size); });

  const double nz_zones = static_cast<double>(zones.size());
  const double np = static_cast<double>(d.levels.size());

  std::vector<double> level_sum(d.ng + 1, 0.0);
  // zone-size marginal, keyed by size
  std::vector<std::pair<int64_t, double>> size_sum;
  {
    std::vector<int64_t> sizes;
    sizes.reserve(zones.size());
    for (auto& z : zones) sizes.push_back(z.second);
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    for (int64_t s : sizes) size_sum.emplace_back(s, 0.0);
  }
  auto size_slot = [&](int64_t s) {
    auto it = std::lower_bound(size_sum.begin(), size_sum.end(), s,
                               [](const auto& a, int64_t v) { return a.first < v; });
    return &it->second;
  };

  double sae = 0, lae = 0, lgl = 0, hgl = 0, salgl = 0, sahgl = 0, lalgl = 0,
         lahgl = 0, mu_i = 0, mu_s = 0;
  for (auto& [level, size] : zones) {
    double i2 = static_cast<double>(level) * level;
    double s2 = static_cast<double>(size) * static_cast<double>(size);
    level_sum[level] += 1.0;
    *size_slot(size) += 1.0;
    sae += 1.0 / s2;
    lae += s2;
    lgl += 1.0 / i2;
    hgl += i2;
    salgl += 1.0 / (i2 * s2);
    sahgl += i2 / s2;
    lalgl += s2 / i2;
    lahgl += i2 * s2;
    mu_i += level / nz_zones;
    mu_s += static_cast<double>(size) / nz_zones;
  }

  double glnu = 0.0;
  for (int i = 1; i <= d.ng; ++i) glnu += level_sum[i] * level_sum[i];
  double sznu = 0.0, entropy = 0.0;
  for (auto& [size, cnt] : size_sum) {
    sznu += cnt * cnt;
    (void)size;
  }
  double var_i = 0.0, var_s = 0.0;
  for (auto& [level, size] : zones) {
    var_i += detail::sq(level - mu_i) / nz_zones;
    var_s += detail::sq(static_cast<double>(size) - mu_s) / nz_zones;
  }
  // entropy over the joint (level, size) distribution
  {
    std::vector<std::pair<int, int64_t>> sorted = zones;
    std::sort(sorted.begin(), sorted.end());
    size_t i = 0;
    while (i < sorted.size()) {
      size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      double p = static_cast<double>(j - i) / nz_zones;
      entropy += detail::entropy_term(p);
      i = j;
    }
  }

  return {
      {"GrayLevelNonUniformity", glnu / nz_zones},
      {"GrayLevelNonUniformityNormalized", glnu / (nz_zones * nz_zones)},
      {"GrayLevelVariance", var_i},
      {"HighGrayLevelZoneEmphasis", hgl / nz_zones},
      {"LargeAreaEmphasis", lae / nz_zones},
      {"LargeAreaHighGrayLevelEmphasis", lahgl / nz_zones},
      {"LargeAreaLowGrayLevelEmphasis", lalgl / nz_zones},
      {"LowGrayLevelZoneEmphasis", lgl / nz_zones},
      {"SizeZoneNonUniformity", sznu / nz_zones},
      {"SizeZoneNonUniformityNormalized", sznu / (nz_zones * nz_zones)},
      {"SmallAreaEmphasis", sae / nz_zones},
      {"SmallAreaHighGrayLevelEmphasis", sahgl / nz_zones},
      {"SmallAreaLowGrayLevelEmphasis", salgl / nz_zones},
      {"ZoneEntropy", entropy},
      {"ZonePercentage", nz_zones / np},
      {"ZoneVariance", var_s},
  };
}

}  // namespace radpipe
