#pragma once

#include <cstdint>
#include <vector>

namespace votebound {

/// Deterministic 64-bit generator (xoshiro256**). Doubles are derived from
/// the high 53 bits, so streams are bit-reproducible across platforms and
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform01();

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

  /// Flat (Dirichlet(1,...,1)) point on the n-simplex via sorted uniform
  /// spacings.
  std::vector<double> simplex(std::size_t n);

 private:
  std::uint64_t state_[4];
};

}  // namespace votebound
