#pragma once

#include <cstdint>

namespace qproof {

// Deterministic 64-bit generator (splitmix64). The whole toolkit samples
// through this one algorithm so a seed reproduces the same histograms on
// every platform; doubles take the top 53 bits of one output word.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n); modulo bias is well below any tolerance used here.
  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  // Independent child stream for (seed, index); used so per-copy and
  // per-run sampling is schedule independent.
  SeededRng substream(std::uint64_t index) const {
    SeededRng mixer(state_ ^ (0xA0761D6478BD642FULL * (index + 1)));
    return SeededRng(mixer.next_u64());
  }

 private:
  std::uint64_t state_;
};

}  // namespace qproof
