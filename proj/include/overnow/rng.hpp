#pragma once

#include <cstdint>
#include <stdexcept>

namespace overnow {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic xoshiro256++ stream. Independent child streams are derived
/// from the birth seed by key, so consuming one stream never perturbs another.
class Rng {
 public:
  Rng() : Rng(0) {}

  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = detail::splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Unbiased uniform draw in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("rng bound must be positive");
    if ((bound & (bound - 1)) == 0) return next() & (bound - 1);
    std::uint64_t x, r;
    do {
      x = next();
      r = x % bound;
    } while (x - r > ~std::uint64_t{0} - (bound - 1));
    return r;
  }

  /// Uniform in the open interval (0, 1); 53-bit resolution.
  double open01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  /// Independent stream keyed off this stream's birth seed (not its state).
  Rng derive(std::uint64_t key) const {
    std::uint64_t sm = seed_ ^ (key * 0x9e3779b97f4a7c15ULL);
    detail::splitmix64(sm);
    return Rng(detail::splitmix64(sm));
  }

  std::uint64_t birth_seed() const { return seed_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::uint64_t s_[4];
};

}  // namespace overnow
