#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace mrsim {

inline std::uint64_t splitmix64(std::uint64_t &state)
{
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for substream `index` of `master`. Independent of evaluation order, so
// parallel schedules reproduce sequential results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
  std::uint64_t s = master;
  std::uint64_t const a = splitmix64(s);
  s = a ^ (index * 0xd1b54a32d192ed03ULL);
  return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j)
{
  return derive_seed(derive_seed(master, i), j);
}

// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator, but
// normal() is implemented here rather than via <random> distributions so that
// streams are identical across standard library implementations.
class Xoshiro256
{
public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed)
  {
    std::uint64_t sm = seed;
    for (auto &w : s_) {
      w = splitmix64(sm);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()()
  {
    std::uint64_t const result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t const t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; caches the second variate.
  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
      u1 = uniform();
    }
    double const u2 = uniform();
    double const r = std::sqrt(-2.0 * std::log(u1));
    double const theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t below(std::uint64_t n) { return n ? (*this)() % n : 0; }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace mrsim
