#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace harlearn {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// FNV-1a, used to fold subject ids into seed derivation paths.
inline std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministically derives a sub-seed from a master seed and a path of
/// integers (subject hash, step, model index, purpose tag, ...). Every random
/// draw in an experiment traces back to one master seed through this.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master ^ 0xd6e8feb86659fd93ULL;
  detail::splitmix64(state);
  for (std::uint64_t p : path) {
    state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    detail::splitmix64(state);
  }
  return detail::splitmix64(state);
}

/// Deterministic generator. All distributions are implemented here, not
/// delegated to <random> distributions, so streams are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x853c49e6748fea9bULL) {
    // warm up
    for (int i = 0; i < 4; ++i) detail::splitmix64(state_);
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n) {
    // 128-bit multiply trick; bias is negligible and the stream is ours.
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace harlearn
