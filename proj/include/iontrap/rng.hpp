#ifndef IONTRAP_RNG_HPP
#define IONTRAP_RNG_HPP

#include <cstdint>

namespace iontrap {

// Counter-based generator (SplitMix64).  The output at counter k depends only
// on (seed, k), so independently derived streams can be consumed in any order
// and from any thread without coordination.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform over {0, 1, 2, 3} from the top bits.
  int next_index4() { return static_cast<int>(next_u64() >> 62); }

 private:
  std::uint64_t state_;
};

enum class StreamPurpose : std::uint64_t {
  kPulsePhases = 1,
  kMeasurement = 2,
  kWalkerAxes = 3,
  kSynthesis = 4,
};

inline std::uint64_t mix_u64(std::uint64_t z) {
  z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDULL;
  z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ULL;
  return z ^ (z >> 33);
}

// One independent stream per (master seed, stream id, purpose).
inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t stream_id,
                         StreamPurpose purpose) {
  std::uint64_t s = mix_u64(master_seed ^ 0xA0761D6478BD642FULL);
  s = mix_u64(s ^ mix_u64(stream_id ^ 0xE7037ED1A0B428DBULL));
  s = mix_u64(s ^ mix_u64(static_cast<std::uint64_t>(purpose) ^ 0x8EBC6AF09C88C6E3ULL));
  return Rng(s);
}

}  // namespace iontrap

#endif  // IONTRAP_RNG_HPP
