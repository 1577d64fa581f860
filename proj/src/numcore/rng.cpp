#include "xlt/numcore/rng.hpp"

#include <limits>

namespace xlt::numcore {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return Rng(mix(mix(seed, stream), index));
}

int Rng::uniform_int(int lo, int hi) {
  const auto range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (range == 0) return lo;  // full 64-bit range cannot happen with int bounds
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v = next();
  while (v >= limit) v = next();
  return static_cast<int>(static_cast<std::int64_t>(lo) + static_cast<std::int64_t>(v % range));
}

}  // namespace xlt::numcore
