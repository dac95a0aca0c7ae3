#include <algorithm>
#include <array>
#include <cmath>

#include "radiomics_common.hpp"
#include "radpipe/error.hpp"
#include "radpipe/kernels.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

namespace {

// k-th smallest value (0-based) from an exact 256-bin histogram.
int kth_value(const std::array<int64_t, 256>& hist, int64_t k) {
  int64_t seen = 0;
  for (int v = 0; v < 256; ++v) {
    seen += hist[v];
    if (seen > k) return v;
  }
  return 255;
}

// Order statistic with linear interpolation between ranks (the numpy
// default), evaluated from the histogram.
double percentile(const std::array<int64_t, 256>& hist, int64_t n, double q) {
  double rank = (n - 1) * q / 100.0;
  int64_t lo = static_cast<int64_t>(std::floor(rank));
  double frac = rank - lo;
  double v0 = kth_value(hist, lo);
  if (frac == 0.0) return v0;
  double v1 = kth_value(hist, lo + 1);
  return v0 * (1.0 - frac) + v1 * frac;
}

}  // namespace

NamedValues first_order_features(const GrayVolume& stack, const ExtractionParams& p) {
  if (stack.voxels.empty())
    fail(ErrorCode::BadArgument, "first_order: empty stack");

  const int64_t n = static_cast<int64_t>(stack.voxels.size());

  uint64_t usum = 0, usumsq = 0;
  kernels::ops().sum_sumsq_u8(stack.voxels.data(), stack.voxels.size(), &usum, &usumsq);

  std::array<int64_t, 256> hist{};
  for (uint8_t v : stack.voxels) hist[v]++;

  int minimum = 0, maximum = 255;
  while (hist[minimum] == 0) ++minimum;
  while (hist[maximum] == 0) --maximum;

  const double mean = static_cast<double>(usum) / n;
  const double energy = static_cast<double>(usumsq);

  // central moments from the histogram
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, mad = 0.0;
  for (int v = minimum; v <= maximum; ++v) {
    if (hist[v] == 0) continue;
    double d = v - mean;
    double c = static_cast<double>(hist[v]);
    m2 += c * d * d;
    m3 += c * d * d * d;
    m4 += c * d * d * d * d;
    mad += c * std::abs(d);
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  mad /= n;

  const double p10 = percentile(hist, n, 10.0);
  const double p25 = percentile(hist, n, 25.0);
  const double p50 = percentile(hist, n, 50.0);
  const double p75 = percentile(hist, n, 75.0);
  const double p90 = percentile(hist, n, 90.0);

  // robust MAD: deviation within the [p10, p90] value band
  double rsum = 0.0;
  int64_t rcount = 0;
  for (int v = minimum; v <= maximum; ++v) {
    if (hist[v] && v >= p10 && v <= p90) {
      rsum += static_cast<double>(hist[v]) * v;
      rcount += hist[v];
    }
  }
  double rmad = 0.0;
  if (rcount > 0) {
    double rmean = rsum / rcount;
    double racc = 0.0;
    for (int v = minimum; v <= maximum; ++v)
      if (hist[v] && v >= p10 && v <= p90)
        racc += static_cast<double>(hist[v]) * std::abs(v - rmean);
    rmad = racc / rcount;
  }

  const double skewness = m2 > detail::kDegenerateEps ? m3 / std::pow(m2, 1.5) : 0.0;
  const double kurtosis = m2 > detail::kDegenerateEps ? m4 / (m2 * m2) : 0.0;

  // entropy/uniformity over the same discretization the texture families use
  DiscreteStack d = discretize(stack, p);
  std::vector<int64_t> level_hist(d.ng + 1, 0);
  for (int level : d.levels) level_hist[level]++;
  double entropy = 0.0, uniformity = 0.0;
  for (int level = 1; level <= d.ng; ++level) {
    double prob = static_cast<double>(level_hist[level]) / n;
    entropy += detail::entropy_term(prob);
    uniformity += prob * prob;
  }

  const double voxel_volume = stack.spacing[0] * stack.spacing[1] * stack.spacing[2];

  return {
      {"Energy", energy},
      {"Entropy", entropy},
      {"InterquartileRange", p75 - p25},
      {"Kurtosis", kurtosis},
      {"Maximum", static_cast<double>(maximum)},
      {"Mean", mean},
      {"MeanAbsoluteDeviation", mad},
      {"Median", p50},
      {"Minimum", static_cast<double>(minimum)},
      {"Percentile10", p10},
      {"Percentile90", p90},
      {"Range", static_cast<double>(maximum - minimum)},
      {"RobustMeanAbsoluteDeviation", rmad},
      {"RootMeanSquared", std::sqrt(energy / n)},
      {"Skewness", skewness},
      {"TotalEnergy", voxel_volume * energy},
      {"Uniformity", uniformity},
      {"Variance", m2},
  };
}

}  // namespace radpipe
