#pragma once

#include <cstdint>
#include <random>

namespace pesel {

/// SplitMix64 finaliser; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of two seeds into a new stream seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

/// The repository's only random source: a 64-bit Mersenne Twister
/// (std::mt19937_64) seeded with splitmix64(seed). Normal draws use
/// std::normal_distribution and Student draws std::student_t_distribution, so
/// streams are reproducible for a given standard library, not across them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double student_t3() { return student_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::student_t_distribution<double> student_{3.0};
};

}  // namespace pesel
