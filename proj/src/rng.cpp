#include "cs/rng.hpp"

#include <numeric>

namespace cs {

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = uniform_int(i, n - 1);
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream_tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace cs
