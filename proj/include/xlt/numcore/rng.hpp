#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace xlt::numcore {

// Deterministic random source. Wraps std::mt19937_64 (whose output stream is
// pinned by the standard) and implements all derived draws explicitly, so the
// same seed yields the same values on every platform. The standard library
// distributions are deliberately not used: their output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // splitmix64 finalizer; used to derive independent stream seeds.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

  // Independent stream for (seed, stream, index), e.g. per-epoch shuffles or
  // per-step dropout masks. Streams never share draws.
  static Rng derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of randomness.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling, no modulo bias.
  int uniform_int(int lo, int hi);

  // Fisher-Yates, backwards-compatible with nothing but itself.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<int>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Stream tags for Rng::derive. Keeping them in one place guarantees that two
// different subsystems never collide on a stream id.
namespace stream {
inline constexpr std::uint64_t kModelInit = 0x101;
inline constexpr std::uint64_t kLabeledShuffle = 0x201;
inline constexpr std::uint64_t kParallelShuffle = 0x202;
inline constexpr std::uint64_t kLabeledDropout = 0x301;
inline constexpr std::uint64_t kProjectionDropout = 0x302;
inline constexpr std::uint64_t kSynthDoc = 0x401;
inline constexpr std::uint64_t kSynthCipher = 0x402;
inline constexpr std::uint64_t kSynthParallel = 0x403;
inline constexpr std::uint64_t kParagraphSize = 0x404;
inline constexpr std::uint64_t kSweepRun = 0x501;
inline constexpr std::uint64_t kSweepCell = 0x502;
}  // namespace stream

}  // namespace xlt::numcore
