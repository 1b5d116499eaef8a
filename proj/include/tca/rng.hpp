#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tca {

/// Seeded random source producing identical streams on every platform.
/// std::mt19937_64 is bit-exact by the standard; the std distributions are
/// not, so the value transforms are done by hand.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53 bits of entropy.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log1p(-u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Unbiased integer in [0, bound), bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) {
    std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      std::uint64_t candidate = next_u64();
      if (candidate >= threshold) return candidate % bound;
    }
  }

  /// Fisher-Yates shuffle (std::shuffle is not reproducible across stdlibs).
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Draws k distinct indices from [0, n) in selection order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t i = 0; i < k && !pool.empty(); ++i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(pool.size()));
      picked.push_back(pool[j]);
      pool[j] = pool.back();
      pool.pop_back();
    }
    return picked;
  }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tca
