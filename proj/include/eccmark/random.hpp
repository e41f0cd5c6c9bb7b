#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace eccmark {

/// Independent random streams derived from one user seed. Each (domain, index)
/// pair gets its own engine, so replicates can be generated in any order or
/// on any worker and still reproduce bit for bit.
enum class StreamDomain : std::uint64_t {
  locations = 1,
  marks = 2,
  permutation = 3,
  csr_null = 4,
  replicate = 5,
  trial = 6,
};

using Rng = std::mt19937_64;

inline constexpr std::string_view kGeneratorName = "mt19937_64/splitmix64(seed,domain,index)";

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t index);

Rng make_rng(std::uint64_t seed, StreamDomain domain, std::uint64_t index);

}  // namespace eccmark
