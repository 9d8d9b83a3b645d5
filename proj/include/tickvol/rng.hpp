#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tickvol {

using Engine = std::mt19937_64;

/// Derives an independent sub-stream seed from a master seed, a stream tag
/// ("arrivals", "increments", "noise", "replication", ...) and an index.
/// Stable across platforms: FNV-1a over the tag, splitmix64 finalisation.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

}  // namespace tickvol
