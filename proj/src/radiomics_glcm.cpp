#include <algorithm>
#include <cmath>

#include "radiomics_common.hpp"
#include "radpipe/error.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

namespace detail {

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  // cyclic Jacobi; matrices here are tiny (occupied gray levels squared)
  auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-24) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.rbegin(), eig.rend());
  return eig;
}

}  // namespace detail

std::vector<std::array<int, 3>> glcm_directions(const std::array<int, 3>& dims) {
  // offsets unique up to sign, ordered (z, y, x)
  static const std::vector<std::array<int, 3>> kInPlane = {
      {0, 0, 1}, {0, 1, -1}, {0, 1, 0}, {0, 1, 1}};
  static const std::vector<std::array<int, 3>> kFull = {
      {0, 0, 1},  {0, 1, -1}, {0, 1, 0},  {0, 1, 1},  {1, -1, -1},
      {1, -1, 0}, {1, -1, 1}, {1, 0, -1}, {1, 0, 0},  {1, 0, 1},
      {1, 1, -1}, {1, 1, 0},  {1, 1, 1}};
  return dims[0] == 1 ? kInPlane : kFull;
}

CountMatrix glcm_counts(const DiscreteStack& d, const std::array<int, 3>& offset) {
  const int nz = d.dims[0], ny = d.dims[1], nx = d.dims[2];
  const int dz = offset[0], dy = offset[1], dx = offset[2];
  CountMatrix m(d.ng, d.ng);
  for (int z = 0; z < nz; ++z) {
    int z2 = z + dz;
    if (z2 < 0 || z2 >= nz) continue;
    for (int y = 0; y < ny; ++y) {
      int y2 = y + dy;
      if (y2 < 0 || y2 >= ny) continue;
      int x_lo = std::max(0, -dx), x_hi = std::min(nx, nx - dx);
      for (int x = x_lo; x < x_hi; ++x) {
        int a = d.at(z, y, x);
        int b = d.at(z2, y2, x + dx);
        // symmetric: record the pair in both orders
        m.at(a, b)++;
        m.at(b, a)++;
      }
    }
  }
  return m;
}

NamedValues glcm_features_from_counts(const CountMatrix& m, int ng) {
  const int64_t total = m.total();

  // With no co-occurring pairs (single-voxel stacks) the matrix degenerates
  // to a single certain event; use the constant-stack feature values.
  if (total == 0) {
    return {
        {"Autocorrelation", 1.0}, {"ClusterProminence", 0.0}, {"ClusterShade", 0.0},
        {"ClusterTendency", 0.0}, {"Contrast", 0.0},          {"Correlation", 1.0},
        {"DifferenceAverage", 0.0}, {"DifferenceEntropy", 0.0}, {"DifferenceVariance", 0.0},
        {"Id", 1.0},             {"Idm", 1.0},               {"Idmn", 1.0},
        {"Idn", 1.0},            {"Imc1", 0.0},              {"Imc2", 0.0},
        {"InverseVariance", 0.0}, {"JointAverage", 1.0},     {"JointEnergy", 1.0},
        {"JointEntropy", 0.0},   {"MCC", 1.0},               {"MaximumProbability", 1.0},
        {"SumAverage", 2.0},     {"SumEntropy", 0.0},        {"SumSquares", 0.0},
    };
  }

  std::vector<double> px(ng + 1, 0.0);
  std::vector<double> p_sum(2 * ng + 1, 0.0);
  std::vector<double> p_diff(ng, 0.0);

  double autocorr = 0.0, joint_energy = 0.0, joint_entropy = 0.0;
  double max_prob = 0.0, contrast = 0.0;
  double id = 0.0, idm = 0.0, idn = 0.0, idmn = 0.0, inverse_variance = 0.0;

  const double inv_total = 1.0 / static_cast<double>(total);
  for (int i = 1; i <= ng; ++i) {
    for (int j = 1; j <= ng; ++j) {
      int64_t c = m.at(i, j);
      if (c == 0) continue;
      double p = c * inv_total;
      px[i] += p;
      p_sum[i + j] += p;  // k = i + j in 2..2ng
      p_diff[std::abs(i - j)] += p;
      autocorr += p * i * j;
      joint_energy += p * p;
      joint_entropy += detail::entropy_term(p);
      max_prob = std::max(max_prob, p);
      double diff = i - j;
      contrast += p * diff * diff;
      id += p / (1.0 + std::abs(diff));
      idm += p / (1.0 + diff * diff);
      idn += p / (1.0 + std::abs(diff) / ng);
      idmn += p / (1.0 + diff * diff / (static_cast<double>(ng) * ng));
      if (i != j) inverse_variance += p / (diff * diff);
    }
  }

  double mu = 0.0;
  for (int i = 1; i <= ng; ++i) mu += i * px[i];
  double sigma_sq = 0.0;
  for (int i = 1; i <= ng; ++i) sigma_sq += detail::sq(i - mu) * px[i];

  double cluster_p = 0.0, cluster_s = 0.0, cluster_t = 0.0;
  for (int i = 1; i <= ng; ++i) {
    for (int j = 1; j <= ng; ++j) {
      int64_t c = m.at(i, j);
      if (c == 0) continue;
      double p = c * inv_total;
      double t = i + j - 2.0 * mu;
      cluster_t += t * t * p;
      cluster_s += t * t * t * p;
      cluster_p += t * t * t * t * p;
    }
  }

  double diff_avg = 0.0, diff_entropy = 0.0;
  for (int k = 0; k < ng; ++k) {
    diff_avg += k * p_diff[k];
    diff_entropy += detail::entropy_term(p_diff[k]);
  }
  double diff_var = 0.0;
  for (int k = 0; k < ng; ++k) diff_var += detail::sq(k - diff_avg) * p_diff[k];

  double sum_entropy = 0.0;
  for (int k = 2; k <= 2 * ng; ++k) sum_entropy += detail::entropy_term(p_sum[k]);

  // information measures; the matrix is symmetric so HX == HY
  double hx = 0.0;
  for (int i = 1; i <= ng; ++i) hx += detail::entropy_term(px[i]);
  double hxy1 = 0.0, hxy2 = 0.0;
  for (int i = 1; i <= ng; ++i) {
    if (px[i] <= 0.0) continue;
    for (int j = 1; j <= ng; ++j) {
      if (px[j] <= 0.0) continue;
      double pp = px[i] * px[j];
      hxy2 -= pp * detail::log2p(pp);
      int64_t c = m.at(i, j);
      if (c != 0) hxy1 -= (c * inv_total) * detail::log2p(pp);
    }
  }
  double imc1 = hx > detail::kDegenerateEps ? (joint_entropy - hxy1) / hx : 0.0;
  double imc2_arg = 1.0 - std::exp(-2.0 * (hxy2 - joint_entropy));
  double imc2 = imc2_arg > 0.0 ? std::sqrt(imc2_arg) : 0.0;

  double correlation =
      sigma_sq > detail::kDegenerateEps ? (autocorr - mu * mu) / sigma_sq : 1.0;

  // MCC over occupied levels
  std::vector<int> occ;
  for (int i = 1; i <= ng; ++i)
    if (px[i] > 0.0) occ.push_back(i);
  double mcc = 1.0;
  const int no = static_cast<int>(occ.size());
  if (no > 1) {
    // B = D^-1/2 M D^-1/2 with M(a,b) = sum_k p(a,k) p(b,k) / py(k); B is
    // symmetric and similar to Q, whose second eigenvalue defines MCC.
    std::vector<double> b(static_cast<size_t>(no) * no, 0.0);
    for (int ai = 0; ai < no; ++ai) {
      for (int bi = ai; bi < no; ++bi) {
        double acc = 0.0;
        for (int ki = 0; ki < no; ++ki) {
          double pak = m.at(occ[ai], occ[ki]) * inv_total;
          double pbk = m.at(occ[bi], occ[ki]) * inv_total;
          acc += pak * pbk / px[occ[ki]];
        }
        double v = acc / std::sqrt(px[occ[ai]] * px[occ[bi]]);
        b[static_cast<size_t>(ai) * no + bi] = v;
        b[static_cast<size_t>(bi) * no + ai] = v;
      }
    }
    auto eig = detail::symmetric_eigenvalues(std::move(b), no);
    mcc = eig[1] > 0.0 ? std::sqrt(eig[1]) : 0.0;
  }

  return {
      {"Autocorrelation", autocorr},
      {"ClusterProminence", cluster_p},
      {"ClusterShade", cluster_s},
      {"ClusterTendency", cluster_t},
      {"Contrast", contrast},
      {"Correlation", correlation},
      {"DifferenceAverage", diff_avg},
      {"DifferenceEntropy", diff_entropy},
      {"DifferenceVariance", diff_var},
      {"Id", id},
      {"Idm", idm},
      {"Idmn", idmn},
      {"Idn", idn},
      {"Imc1", imc1},
      {"Imc2", imc2},
      {"InverseVariance", inverse_variance},
      {"JointAverage", mu},
      {"JointEnergy", joint_energy},
      {"JointEntropy", joint_entropy},
      {"MCC", mcc},
      {"MaximumProbability", max_prob},
      {"SumAverage", 2.0 * mu},
      {"SumEntropy", sum_entropy},
      {"SumSquares", sigma_sq},
  };
}

NamedValues glcm_features(const DiscreteStack& d, const ExtractionParams& p) {
  auto dirs = glcm_directions(d.dims);
  std::vector<CountMatrix> mats;
  for (const auto& dir : dirs) {
    std::array<int, 3> offset = {dir[0] * p.distance, dir[1] * p.distance,
                                 dir[2] * p.distance};
    CountMatrix m = glcm_counts(d, offset);
    if (m.total() != 0) mats.push_back(std::move(m));
  }
  if (mats.empty())  // no direction has pairs (single-voxel stack)
    return glcm_features_from_counts(CountMatrix(d.ng, d.ng), d.ng);

  NamedValues acc = glcm_features_from_counts(mats[0], d.ng);
  for (size_t k = 1; k < mats.size(); ++k) {
    NamedValues f = glcm_features_from_counts(mats[k], d.ng);
    for (size_t i = 0; i < acc.size(); ++i) acc[i].second += f[i].second;
  }
  for (auto& kv : acc) kv.second /= static_cast<double>(mats.size());
  return acc;
}

}  // namespace radpipe
