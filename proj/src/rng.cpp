#include "votebound/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace votebound {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& s : state_) s = splitmix64(seed);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

std::vector<double> Rng::simplex(std::size_t n) {
  if (n == 0) throw std::invalid_argument("simplex: n must be positive");
  if (n == 1) return {1.0};
  std::vector<double> cuts(n - 1);
  for (auto& c : cuts) c = uniform01();
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> weights(n);
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    weights[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  weights[n - 1] = 1.0 - prev;
  return weights;
}

}  // namespace votebound
