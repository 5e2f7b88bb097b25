#pragma once
//
// Reproducible random streams.
//
// The generator is SplitMix64: the stream state is a 64-bit counter advanced
// by the golden-ratio increment and each output is the SplitMix64 finalizer
// applied to the counter. Child streams are derived by mixing the parent key
// with a tag, so the Gaussian block drawn for a given (level, node, side) is
// the same no matter which thread draws it or in which order.
//
// Normals use the Box-Muller transform; both outputs of each pair are used.
//

#include <cstdint>
#include <initializer_list>

#include "rsmat/dense.hpp"

namespace rsmat {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)), counter_(0) {}

  // Independent stream keyed by this stream's key and the given tags.
  RandomStream derive(std::initializer_list<std::uint64_t> tags) const;

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double next_uniform();
  double next_normal();

  std::uint64_t key() const { return key_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  RandomStream(std::uint64_t key, int) : key_(key), counter_(0) {}

  std::uint64_t key_;
  std::uint64_t counter_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// n x r matrix of iid standard normal entries, filled column by column.
DenseMatrix gaussian_block(Index n, Index r, RandomStream& rng);
DenseMatrix gaussian_block(Index n, Index r, std::uint64_t seed);

}  // namespace rsmat
