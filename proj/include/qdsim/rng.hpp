#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qdsim {

// Deterministic, platform-independent PRNG (splitmix64). std::mt19937 with
// std::normal_distribution is not reproducible across standard libraries,
// and reproducibility per seed is part of the public contract here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1]  (open at zero, handy for log())
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // multiply-shift; bias is negligible for n << 2^64 and irrelevant here
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // standard normal via Box-Muller (no cached spare: keeps the stream
  // position a simple function of the number of calls)
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // first k entries of a random permutation of [0, n): a k-subset without
  // replacement, returned sorted
  std::vector<int> subset(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("Rng::subset: k out of range");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[i], pool[j]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable stream derivation: sample i of quantity tagged `tag` under `seed`
// gets an independent generator, regardless of evaluation order.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t i) {
  return Rng(mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL) ^ mix64(i * 0xff51afd7ed558ccdULL)));
}

}  // namespace qdsim
