#pragma once

// All randomness flows through std::mt19937_64, whose output sequence is
// fixed by the C++ standard. Standard distributions are implementation
// defined, so index draws use the rejection sampler below instead.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace secord {

using Rng = std::mt19937_64;

// Generator for stream `stream` under `seed`. Streams let parallel workers
// draw independently while staying reproducible.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

// Uniform integer in [0, n). Rejects the biased tail of the 64-bit range.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % n;
}

// k distinct values of [0, n) via a partial Fisher-Yates shuffle, in draw
// order.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n,
                                                           std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace secord
