#ifndef XASPECT_RNG_HPP
#define XASPECT_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace xaspect {

// mt19937_64 wrapped so that every derived quantity (bounded ints, reals,
// shuffles) is computed by our own code. The std distributions are
// implementation-defined, which would break cross-platform reproducibility
// of splits, batches and parameter inits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Unbiased integer in [0, n), n >= 1. Rejection sampling.
  std::uint64_t below(std::uint64_t n);

  // Double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // True with probability p.
  bool bernoulli(double p) { return uniform01() < p; }

  // Fisher-Yates, identical sequence on every platform.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Engine state as text; round-trips exactly.
  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 eng_;
};

// Deterministic stream derivation (splitmix64 finalizer), so e.g. the batch
// order for (seed, epoch) never collides with parameter-init draws.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace xaspect

#endif
