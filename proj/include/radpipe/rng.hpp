#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace radpipe {

// splitmix64 finalizer; used to derive independent stream seeds from a
// master seed plus a tag, so stages and per-item workers never share state.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
  return mix64(master ^ mix64(stream));
}

inline uint64_t tag_hash(std::string_view tag) {
  // FNV-1a 64
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t stream = 0) {
  return mix64(master ^ mix64(tag_hash(tag)) ^ mix64(stream * 0x9e3779b97f4a7c15ull + 1));
}

// Deterministic RNG wrapper. mt19937_64 output is fully specified by the
// standard; the distributions below are implemented here because the
// std::*_distribution value streams are implementation-defined and the
// pipeline needs bit-stable runs.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  uint64_t uniform_int(uint64_t n) {
    // rejection-free modulo would bias; use Lemire-style rejection
    uint64_t x, r;
    do {
      x = gen_();
      r = x % n;
    } while (x - r > uint64_t(0) - n);
    return r;
  }

  // standard normal via Box-Muller (no cached spare, keeps state trivial)
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace radpipe
