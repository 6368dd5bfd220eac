#pragma once

#include <cstdint>

namespace hybridte {

// splitmix64: tiny deterministic generator with stable output across
// platforms and standard library versions. std::uniform_real_distribution
// is implementation-defined, which would break golden files.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1): offsetting by half an ulp of the
  // 53-bit grid keeps both endpoints out.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on (low, high), both endpoints excluded.
  double next_uniform(double low, double high) {
    return low + next_unit() * (high - low);
  }

 private:
  std::uint64_t state_;
};

// Splittable per-trial seeding: hash the (base, index) pair so trials can
// run in any order or in parallel with identical streams.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  SplitMix64 mix(base_seed + 0x632be59bd9b4e019ULL * (index + 1));
  return mix.next_u64();
}

}  // namespace hybridte
