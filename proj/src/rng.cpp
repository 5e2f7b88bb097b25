#include "rsmat/rng.hpp"

#include <cmath>
#include <numbers>

namespace rsmat {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t RandomStream::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream RandomStream::derive(std::initializer_list<std::uint64_t> tags) const {
  std::uint64_t k = key_;
  for (std::uint64_t t : tags) k = mix(k ^ mix(t + kGolden));
  return RandomStream(k, 0);
}

std::uint64_t RandomStream::next_u64() {
  counter_ += kGolden;
  return mix(key_ + counter_);
}

double RandomStream::next_uniform() {
  // 53 random mantissa bits, shifted by half an ulp so 0 is never produced.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

DenseMatrix gaussian_block(Index n, Index r, RandomStream& rng) {
  DenseMatrix g(n, r);
  for (double& v : g.values()) v = rng.next_normal();
  return g;
}

DenseMatrix gaussian_block(Index n, Index r, std::uint64_t seed) {
  RandomStream rng(seed);
  return gaussian_block(n, r, rng);
}

}  // namespace rsmat
