#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace fdreg {

// Substream tags used when fanning one master seed out into independent
// stream seeds. Streams are keyed by (seed, tag, ids...), so adding
// clients, rounds, or epochs never shifts an existing stream.
enum SeedStream : std::uint64_t {
  kStreamData = 1,
  kStreamApPlacement = 2,
  kStreamShadowing = 3,
  kStreamPartition = 4,
  kStreamValidation = 5,
  kStreamClient = 6,
  kStreamInit = 7,
  kStreamShuffle = 8,
  kStreamGlobalInit = 9,
};

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

template <typename... Salts>
constexpr std::uint64_t mix_seed(std::uint64_t seed, Salts... salts) {
  std::uint64_t h = mix64(seed);
  ((h = mix64(h ^ mix64(static_cast<std::uint64_t>(salts)))), ...);
  return h;
}

// Seeded generator with portable value transforms. mt19937_64 output is
// pinned by the standard; the transforms below replace the
// implementation-defined std::*_distribution classes so that identical
// seeds give identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal, Box-Muller with cached spare
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // unbiased integer in [0, bound), bound > 0
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t x = 0;
    std::uint64_t r = 0;
    do {
      x = engine_();
      r = x % bound;
    } while (x - r > UINT64_MAX - (bound - 1));
    return r;
  }

  // Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fdreg
