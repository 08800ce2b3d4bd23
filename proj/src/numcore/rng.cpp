#include "smhgc/numcore/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "smhgc/errors.hpp"

namespace smhgc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::draw_at(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * kGolden);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw ContractError("Rng::uniform_int: empty range");
  // Reject the low partial bucket so every residue is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::derive(std::uint64_t stream_id) const {
  return Rng(mix64(seed_ ^ mix64(stream_id + kGolden)));
}

std::vector<std::uint64_t> Rng::sample_without_replacement(std::uint64_t population,
                                                           std::uint64_t count) {
  if (count > population) {
    throw ContractError("sample_without_replacement: count exceeds population");
  }
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (count == population) {
    for (std::uint64_t i = 0; i < population; ++i) out.push_back(i);
    return out;
  }
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(count * 2);
  for (std::uint64_t j = population - count; j < population; ++j) {
    const std::uint64_t t = uniform_int(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return seed + index * kGolden;
}

}  // namespace smhgc
