#pragma once

#include <cmath>
#include <cstdint>

namespace opmark {

// Seeded RNG used everywhere randomness appears. splitmix64 keeps the
// generated streams identical across platforms and standard libraries,
// which std::mt19937 distributions do not guarantee. Every consumer takes
// an explicit Rng (or a seed); there is no global generator state.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives a child seed from a master seed and a stream tag, so parallel
// stages (per-tree, per-run, per-file) get independent reproducible streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  return splitmix64_next(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, bound). Rejection sampling keeps the draw unbiased.
  std::uint64_t below(std::uint64_t bound) {
    if (bound < 2) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(below(static_cast<std::uint64_t>(n)));
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Standard normal via polar Box-Muller; the spare draw is discarded so the
  // stream position stays a pure function of call count.
  double gaussian() {
    for (;;) {
      const double u = 2.0 * unit() - 1.0;
      const double v = 2.0 * unit() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  Rng split(std::uint64_t stream) const { return Rng(derive_seed(state_, stream)); }

 private:
  std::uint64_t state_;
};

}  // namespace opmark
