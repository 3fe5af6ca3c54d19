// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace textforge {

/// Seeded generator with platform-independent derived distributions.
/// std::mt19937_64 output is fully specified by the standard; the standard
/// distributions are not, so uniform/shuffle are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Child generator for an independent consumer (parameter init, shuffling,
  /// ...). Derivation depends only on the root seed and the stream id.
  static Rng derive(std::uint64_t root_seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(root_seed),
                      static_cast<std::uint32_t>(root_seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    Rng r;
    r.engine_.seed(seq);
    return r;
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 24 bits of resolution.
  float uniform01() {
    return static_cast<float>(engine_() >> 40) * (1.0f / 16777216.0f);
  }

  float uniform(float lo, float hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    // Lemire-style rejection to avoid modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  void fill_uniform(std::span<float> out, float lo, float hi) {
    for (auto& v : out) v = uniform(lo, hi);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace textforge
