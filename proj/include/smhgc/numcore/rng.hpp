#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace smhgc {

// Counter-based generator: draw i of a stream is a pure function of
// (seed, i), via the SplitMix64 finalizer. Identical seeds give identical
// streams on every platform; only the integer arithmetic is involved until
// a draw is converted to floating point.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  // Stateless access to draw `index` of this stream.
  static std::uint64_t draw_at(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return draw_at(seed_, counter_++); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal();

  // Independent child stream; depends only on (seed, stream_id).
  Rng derive(std::uint64_t stream_id) const;

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // `count` distinct values from [0, population), sorted ascending
  // (Floyd's algorithm).
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population,
                                                        std::uint64_t count);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Seed for the index-th run of a sweep. Index 0 maps to the base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace smhgc
