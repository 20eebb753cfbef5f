#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace llmfs {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// Sub-stream derivation: every unit of parallel work (feature j, tree t,
// grid cell) gets its own seed so results never depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return detail::splitmix64(seed ^ detail::splitmix64(salt));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt) {
  return derive_seed(seed, detail::fnv1a64(salt));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view a,
                                    std::string_view b) {
  return derive_seed(derive_seed(seed, a), b);
}

// Deterministic RNG with portable helper distributions. mt19937_64 output is
// specified bit-for-bit by the standard; the helpers below avoid
// implementation-defined std::*_distribution so streams are stable across
// standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(detail::splitmix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Uniform in [0, n) via 128-bit multiply; bias is < 2^-64.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; two draws per sample keeps the stream
  // position independent of past calls.
  double gaussian() {
    double u1 = 1.0 - uniform();  // (0, 1], log stays finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  // k distinct values from {0, ..., n-1}, order randomized.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + below(n - i)]);
    }
    pool.resize(k);
    return pool;
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace llmfs
