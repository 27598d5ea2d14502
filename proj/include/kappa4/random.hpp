#pragma once

#include <cstdint>
#include <random>

namespace kappa4 {

// SplitMix64 finaliser; used to derive well-separated seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of substream `stream` under master `seed`. Distinct (seed, stream)
// pairs give independent-looking generators regardless of evaluation order.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Uniform variates on the open interval (0, 1).
//
// std::uniform_real_distribution is not bit-reproducible across standard
// libraries, so the 53-bit conversion is done here. Values are
// (m + 0.5) / 2^53, which never hit 0 or 1.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    const std::uint64_t m = engine_() >> 11;
    return (static_cast<double>(m) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kappa4
