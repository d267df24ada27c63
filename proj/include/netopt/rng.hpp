#pragma once
// Seeded random source with hand-rolled uniform draws. std::mt19937_64 is
// bit-portable across standard libraries; the distributions are not, so we
// derive values from raw engine output ourselves.

#include <cstdint>
#include <random>

namespace netopt {

// Stateless mixer, used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1)
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // [0, n); n must be positive
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace netopt
