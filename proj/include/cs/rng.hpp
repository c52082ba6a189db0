#ifndef CS_RNG_HPP
#define CS_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace cs {

/// Seeded random source. All randomness in the library flows through
/// explicit Rng values, so identical seeds reproduce identical draws.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// +1 or -1 with equal probability.
  double pm_one() { return (engine_() & 1u) ? 1.0 : -1.0; }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// k distinct indices from [0, n), ascending. Partial Fisher-Yates.
  std::vector<int> sample_without_replacement(int n, int k);

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_tag);

}  // namespace cs

#endif  // CS_RNG_HPP
