#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace opo {

// Counter-based generator: output n is splitmix64's finalizer applied to
// seed + n * golden gamma. Draws depend only on (seed, counter), so any
// stream can be replayed from its seed alone.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::string_view kName = "splitmix64-counter";

  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(seed_ + (++counter_) * kGamma); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi].
  std::size_t uniform_int(std::size_t lo, std::size_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::size_t>(uniform() * static_cast<double>(span));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Inverse-CDF draw from an (unnormalized) weight vector.
  std::size_t categorical(std::span<const double> weights);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  // Seed for the idx-th independent sub-stream of `base`.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t idx) {
    return mix(mix(base) ^ (idx + 0x632be59bd9b4e019ULL));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

inline std::size_t CounterRng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // u landed on the rounding tail; return the last positive entry
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

}  // namespace opo
