#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace recomb {

// All randomness flows through this engine. std::mt19937_64's output sequence
// is fixed by the standard, unlike the std distributions, so the helpers
// below keep generated files identical across standard libraries.
using Rng = std::mt19937_64;

// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace recomb
