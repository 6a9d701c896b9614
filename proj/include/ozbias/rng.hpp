#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ozbias {

// The std:: distributions are implementation-defined, so every random draw in
// the project goes through the helpers below on top of std::mt19937 (whose
// output stream is fully specified). Seeded results are reproducible across
// compilers and standard libraries.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent engine for stream `id` of a master seed.
inline std::mt19937 make_rng(std::uint64_t seed, std::uint64_t id = 0) {
  return std::mt19937(
      static_cast<std::uint32_t>(splitmix64(seed ^ splitmix64(id)) >> 16));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937& rng) {
  std::uint64_t hi = rng();
  std::uint64_t lo = rng();
  return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n) by rejection.
inline std::uint32_t uniform_int(std::mt19937& rng, std::uint32_t n) {
  if (n <= 1) return 0;
  const std::uint32_t limit = 0xffffffffu - 0xffffffffu % n;
  std::uint32_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

// Standard normal via Box-Muller (no state, two uniforms per draw).
inline double normal01(std::mt19937& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

template <class T>
void shuffle_indices(std::vector<T>& v, std::mt19937& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_int(rng, static_cast<std::uint32_t>(i));
    std::swap(v[i - 1], v[j]);
  }
}

// First k entries of a random permutation of [0, n).
inline std::vector<int> sample_without_replacement(std::mt19937& rng, int n,
                                                   int k) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k && i < n; ++i) {
    int j = i + static_cast<int>(uniform_int(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(std::min(k, n));
  return idx;
}

}  // namespace ozbias
