#pragma once

#include <cstdint>
#include <random>

namespace wct {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Child streams are keyed off a master seed plus a purpose tag and up to two
// extra indices (trial number, job class, ...). Streams with distinct keys are
// treated as independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = master;
  s ^= splitmix64(s) + tag;
  s ^= splitmix64(s) + a;
  s ^= splitmix64(s) + b;
  return splitmix64(s);
}

namespace seed_tag {
inline constexpr std::uint64_t beta = 0x6265746131ull;
inline constexpr std::uint64_t round_class = 0x726f756e64ull;
inline constexpr std::uint64_t trial = 0x747269616cull;
inline constexpr std::uint64_t generate = 0x67656e65ull;
}  // namespace seed_tag

// Seeded stream with replacements for the std:: distributions, whose output is
// implementation-defined; these produce identical sequences on any platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // uniform integer in [lo, hi], inclusive
  long long uniform_int(long long lo, long long hi) {
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(gen_() % span);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace wct
