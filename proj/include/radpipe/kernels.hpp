#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops used by the pipeline's hot paths: HU windowing
// over whole volumes, integer moment accumulation over ROI stacks, and the
// dot/axpy pair driving LASSO and the linear trainers.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. Equivalence between backends is covered by
// tests: elementwise and integer kernels must match bit-exactly, floating
// reductions within a small relative tolerance (lane-parallel accumulation
// reorders additions).

namespace radpipe::kernels {

struct Ops {
  // dst[i] = nearbyint(clamp((src[i] - lo) * inv_width, 0, 1) * 255)
  // Rounding is ties-to-even in every backend so results are identical.
  void (*window_i16_u8)(const int16_t* src, uint8_t* dst, size_t n, float lo,
                        float inv_width);

  // Exact integer accumulation: sum of values and sum of squared values.
  void (*sum_sumsq_u8)(const uint8_t* src, size_t n, uint64_t* sum,
                       uint64_t* sumsq);

  double (*dot)(const double* a, const double* b, size_t n);

  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, size_t n);

  // sum((a[i] - b[i])^2)
  double (*sqdist)(const double* a, const double* b, size_t n);

  const char* name;
};

enum class Backend { Auto, Scalar, Avx2 };

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unsupported (arch or cpu)

// Active dispatch table. Defaults to the best backend the CPU supports.
const Ops& ops();
void force_backend(Backend b);  // Avx2 on an unsupported CPU throws
Backend active_backend();
const char* backend_name();

}  // namespace radpipe::kernels
