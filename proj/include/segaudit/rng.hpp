#ifndef SEGAUDIT_RNG_HPP
#define SEGAUDIT_RNG_HPP

#include <cstdint>

namespace segaudit {

// SplitMix64 (Steele, Lea & Flood 2014). Constants:
//   increment 0x9E3779B97F4A7C15 (golden ratio), mixers 0xBF58476D1CE4E5B9
//   and 0x94D049BB133111EB, shifts 30/27/31.
// The single PRNG for every randomized step in the toolkit. Identical seed,
// identical stream, on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

  // Uniform integer in [0, n), multiply-shift bounding (no rejection loop).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Derives an independent substream seed from a master seed and a stream
// index, via the SplitMix64 output scrambler. Used to give every synthetic
// case (and every assignment pass) its own stream: redrawing case i never
// perturbs case j.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace segaudit

#endif
