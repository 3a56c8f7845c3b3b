#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace garchre {

using Rng = std::mt19937_64;

/// Derives an independent stream from a master seed and a list of stream ids
/// (e.g. day index, purpose). The result does not depend on the order in
/// which other streams are created.
inline Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * ids.size());
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto id : ids) {
    words.push_back(static_cast<std::uint32_t>(id));
    words.push_back(static_cast<std::uint32_t>(id >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Uniform draw on the open interval (0, 1).
inline double open_uniform(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = 0.0;
  do {
    u = unif(rng);
  } while (u <= 0.0);
  return u;
}

}  // namespace garchre
