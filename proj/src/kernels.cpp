#include "radpipe/kernels.hpp"

#include <atomic>

#include "radpipe/error.hpp"

namespace radpipe::kernels {

const Ops* avx2_ops_impl();  // defined in kernels_avx2.cpp

namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const Ops*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::Auto};

const Ops* pick_default() {
  const Ops* avx2 = avx2_ops();
  return avx2 ? avx2 : &scalar_ops();
}

}  // namespace

const Ops* avx2_ops() {
  const Ops* built = avx2_ops_impl();
  if (built == nullptr) return nullptr;
  return cpu_has_avx2() ? built : nullptr;
}

const Ops& ops() {
  const Ops* p = g_active.load(std::memory_order_acquire);
  if (p == nullptr) {
    p = pick_default();
    g_active.store(p, std::memory_order_release);
  }
  return *p;
}

void force_backend(Backend b) {
  switch (b) {
    case Backend::Auto:
      g_active.store(pick_default(), std::memory_order_release);
      break;
    case Backend::Scalar:
      g_active.store(&scalar_ops(), std::memory_order_release);
      break;
    case Backend::Avx2: {
      const Ops* avx2 = avx2_ops();
      if (avx2 == nullptr)
        fail(ErrorCode::BadArgument, "kernels: avx2 backend not available on this cpu/build");
      g_active.store(avx2, std::memory_order_release);
      break;
    }
  }
  g_backend.store(b, std::memory_order_release);
}

Backend active_backend() { return g_backend.load(std::memory_order_acquire); }

const char* backend_name() { return ops().name; }

}  // namespace radpipe::kernels
