#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace vrjp {

/// One step of the SplitMix64 output function. Used both as a generator
/// and as the mixing function for substream key derivation.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// Stateless 64-bit finalizer (SplitMix64 mix of `x + golden gamma`).
std::uint64_t mix64(std::uint64_t x);

/// Deterministic random stream addressed by a master seed and a derivation
/// path. Two streams with the same (seed, path) produce the same sequence on
/// every platform; streams on different paths are derived through a 64-bit
/// mixing hash and are not designed to correlate.
///
/// The engine is xoshiro256**; the state is seeded from the path key with
/// SplitMix64. Satisfies std::uniform_random_bit_generator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});
  RngStream(std::uint64_t seed, std::span<const std::uint64_t> path);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1); -log of it is finite and > 0.
  double uniform_open();
  /// Exponential variate with the given rate (> 0).
  double exponential(double rate);
  bool bernoulli(double p);

  /// Child stream whose path is this stream's path extended by `index`.
  /// Independent of how many draws have been taken from *this.
  [[nodiscard]] RngStream substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

 private:
  void init();

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::uint64_t s_[4];
};

}  // namespace vrjp
