#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace threestage {

// Stream domains keep per-block, per-trial and per-parity streams disjoint
// even when they share a parent seed and index.
enum class StreamDomain : std::uint64_t {
  kBlock = 1,
  kTrial = 2,
  kParity = 3,
  kMonteCarlo = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Child seed as a pure function of (parent seed, domain, index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain,
                                    std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain))) ^
                    splitmix64(index));
}

// Seeded random stream with platform-independent output. std::mt19937_64 is
// fully specified by the standard; the distributions below are hand-rolled
// because the std:: ones are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;
    std::uint64_t x = engine_();
    while (x > limit) x = engine_();
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace threestage
