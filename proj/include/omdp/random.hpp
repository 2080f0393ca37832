#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace omdp {

/// Seedable random stream owned by one run.
///
/// The generator family is std::mt19937_64 seeded with the run seed. A
/// uniform draw takes the top 53 bits of one engine output, so the value
/// sequence is identical across standard libraries (unlike
/// std::uniform_real_distribution).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  /// Uniform in [0, 1). Consumes exactly one engine output.
  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  /// Raw 64-bit output; used for deriving sub-seeds.
  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
};

/// splitmix64 finalizer; mixes a counter into a well-spread seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Inverse-CDF lookup: first index whose running sum exceeds u, scanning
/// in ascending order. Falls back to the last index with positive mass when
/// rounding leaves the total slightly below u.
std::size_t sample_index(std::span<const double> probs, double u);

}  // namespace omdp
