#pragma once

#include <cstdint>
#include <random>

namespace mbqkd {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded random stream. mt19937_64 output is fixed by the standard; the
// conversions below avoid std:: distributions, whose algorithms are
// implementation-defined, so identical seeds give identical draws everywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Independent substream for one round of a session.
  static RandomStream for_round(std::uint64_t session_seed, std::uint64_t round_id) {
    return RandomStream(session_seed ^ splitmix64(round_id + 0x5851f42d4c957f2dULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mbqkd
