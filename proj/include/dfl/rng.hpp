#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dfl {

using Rng = std::mt19937_64;

/// Seed for an independent named stream. Distinct (base, index, role)
/// triples give unrelated streams, so adding a consumer never shifts the
/// draws seen by another one.
std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index,
                          std::string_view role);

inline Rng make_stream(std::uint64_t base_seed, std::uint64_t index,
                       std::string_view role) {
  return Rng(stream_seed(base_seed, index, role));
}

}  // namespace dfl
