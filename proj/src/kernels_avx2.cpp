// AVX2 kernel variants. This translation unit is the only one built with
// -mavx2 -mfma; it is entered solely through the dispatch table after a
// runtime cpuid check.

#include "radpipe/kernels.hpp"

#if (defined(__x86_64__) || defined(_M_X64)) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace radpipe::kernels {

namespace {

// Windowing keeps mul/sub separate (no FMA) to stay bit-identical with the
// scalar reference; _MM_FROUND_TO_NEAREST_INT matches nearbyintf under the
// default rounding mode.
void window_i16_u8_avx2(const int16_t* src, uint8_t* dst, size_t n, float lo,
                        float inv_width) {
  const __m256 vlo = _mm256_set1_ps(lo);
  const __m256 vinv = _mm256_set1_ps(inv_width);
  const __m256 v255 = _mm256_set1_ps(255.0f);
  const __m256 v0 = _mm256_setzero_ps();
  const __m256 v1 = _mm256_set1_ps(1.0f);

  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m256i w = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    __m256i lo32 = _mm256_cvtepi16_epi32(_mm256_castsi256_si128(w));
    __m256i hi32 = _mm256_cvtepi16_epi32(_mm256_extracti128_si256(w, 1));

    auto map = [&](__m256i v32) {
      __m256 f = _mm256_cvtepi32_ps(v32);
      __m256 t = _mm256_mul_ps(_mm256_sub_ps(f, vlo), vinv);
      t = _mm256_max_ps(t, v0);
      t = _mm256_min_ps(t, v1);
      t = _mm256_mul_ps(t, v255);
      t = _mm256_round_ps(t, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
      return _mm256_cvtps_epi32(t);
    };

    __m256i a = map(lo32);  // 8 ints
    __m256i b = map(hi32);  // 8 ints
    // pack 16x int32 -> 16x u8
    __m256i packed16 = _mm256_packs_epi32(a, b);           // lane-interleaved
    packed16 = _mm256_permute4x64_epi64(packed16, 0xd8);   // fix lane order
    __m128i lo16 = _mm256_castsi256_si128(packed16);
    __m128i hi16 = _mm256_extracti128_si256(packed16, 1);
    __m128i bytes = _mm_packus_epi16(lo16, hi16);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(dst + i), bytes);
  }
  for (; i < n; ++i) {
    float t = (static_cast<float>(src[i]) - lo) * inv_width;
    if (t < 0.0f) t = 0.0f;
    if (t > 1.0f) t = 1.0f;
    float r = t * 255.0f;
    __m128 v = _mm_set_ss(r);
    v = _mm_round_ss(v, v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    dst[i] = static_cast<uint8_t>(_mm_cvtss_si32(v));
  }
}

void sum_sumsq_u8_avx2(const uint8_t* src, size_t n, uint64_t* sum,
                       uint64_t* sumsq) {
  uint64_t s = 0, ss = 0;
  size_t i = 0;
  const __m256i zero = _mm256_setzero_si256();
  // Block size keeps the 32-bit square accumulators far from overflow:
  // 255^2 * 2 * 4096 < 2^31.
  const size_t kBlock = 4096;
  while (i + 32 <= n) {
    size_t end = i + kBlock * 32;
    if (end > n) end = i + ((n - i) / 32) * 32;
    __m256i acc_sq = zero;
    __m256i acc_sum = zero;
    for (; i + 32 <= end; i += 32) {
      __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
      acc_sum = _mm256_add_epi64(acc_sum, _mm256_sad_epu8(v, zero));
      __m256i v16lo = _mm256_unpacklo_epi8(v, zero);
      __m256i v16hi = _mm256_unpackhi_epi8(v, zero);
      acc_sq = _mm256_add_epi32(acc_sq, _mm256_madd_epi16(v16lo, v16lo));
      acc_sq = _mm256_add_epi32(acc_sq, _mm256_madd_epi16(v16hi, v16hi));
    }
    alignas(32) uint64_t sums[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(sums), acc_sum);
    s += sums[0] + sums[1] + sums[2] + sums[3];
    alignas(32) uint32_t sq[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(sq), acc_sq);
    for (uint32_t v : sq) ss += v;
  }
  for (; i < n; ++i) {
    uint64_t v = src[i];
    s += v;
    ss += v * v;
  }
  *sum = s;
  *sumsq = ss;
}

double dot_avx2(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double acc = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double sqdist_avx2(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double out = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    out += d * d;
  }
  return out;
}

}  // namespace

const Ops* avx2_ops_impl() {
  static const Ops ops = {
      window_i16_u8_avx2, sum_sumsq_u8_avx2, dot_avx2,
      axpy_avx2,          sqdist_avx2,       "avx2",
  };
  return &ops;
}

}  // namespace radpipe::kernels

#else

namespace radpipe::kernels {
const Ops* avx2_ops_impl() { return nullptr; }
}  // namespace radpipe::kernels

#endif
