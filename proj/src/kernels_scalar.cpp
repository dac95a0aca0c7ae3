// Scalar reference kernels. Compiled with -ffp-contract=off so the compiler
// cannot fuse the windowing multiply-add; the AVX2 variant uses the same
// operation order and the two must agree bit-for-bit.

#include "radpipe/kernels.hpp"

#include <cmath>

namespace radpipe::kernels {

namespace {

void window_i16_u8_scalar(const int16_t* src, uint8_t* dst, size_t n, float lo,
                          float inv_width) {
  for (size_t i = 0; i < n; ++i) {
    float t = (static_cast<float>(src[i]) - lo) * inv_width;
    if (t < 0.0f) t = 0.0f;
    if (t > 1.0f) t = 1.0f;
    dst[i] = static_cast<uint8_t>(std::nearbyintf(t * 255.0f));
  }
}

void sum_sumsq_u8_scalar(const uint8_t* src, size_t n, uint64_t* sum,
                         uint64_t* sumsq) {
  uint64_t s = 0, ss = 0;
  for (size_t i = 0; i < n; ++i) {
    uint64_t v = src[i];
    s += v;
    ss += v * v;
  }
  *sum = s;
  *sumsq = ss;
}

double dot_scalar(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sqdist_scalar(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      window_i16_u8_scalar, sum_sumsq_u8_scalar, dot_scalar,
      axpy_scalar,          sqdist_scalar,       "scalar",
  };
  return ops;
}

}  // namespace radpipe::kernels
