#include "eccmark/random.hpp"

namespace eccmark {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(domain));
  return splitmix64(h ^ index);
}

Rng make_rng(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
  return Rng(derive_seed(seed, domain, index));
}

}  // namespace eccmark
