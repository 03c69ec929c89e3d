#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace lob {

/// SplitMix64 finalizer; used to derive engine seeds from (master, stream).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream keyed by (master_seed, stream_index).
///
/// The engine is the 64-bit Mersenne Twister (mt19937_64) seeded with
/// splitmix64(splitmix64(master_seed) ^ stream_index). Binomial and Poisson
/// variates come from Boost.Random, whose algorithms are fixed in the headers
/// and do not vary by platform, unlike std::*_distribution.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : seed_(derive_seed(master_seed, stream_index)), engine_(seed_) {}

  static constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                             std::uint64_t stream_index) noexcept {
    return splitmix64(splitmix64(master_seed) ^ stream_index);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Binomial(trials, p); trials >= 0, p in [0,1].
  std::int64_t binomial(std::int64_t trials, double p);
  /// Poisson(mean); mean >= 0.
  std::int64_t poisson(double mean);
  /// Uniform on [0,1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t seed_;
  boost::random::mt19937_64 engine_;
};

}  // namespace lob
