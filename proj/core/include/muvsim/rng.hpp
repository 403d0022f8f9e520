#pragma once

#include <cstdint>
#include <optional>

namespace muvsim {

/// Deterministic, splittable random stream.
///
/// xoshiro256** seeded through SplitMix64 from a (key, stream) pair. The
/// distributions below are implemented here rather than taken from
/// <random>, whose distribution algorithms are implementation-defined; this
/// keeps every draw identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent child stream. Depends only on this stream's key and `tag`,
  /// never on how many values have been drawn from the parent.
  [[nodiscard]] Rng fork(std::uint64_t tag) const;

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal (Marsaglia polar method).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

  [[nodiscard]] std::uint64_t key() const { return key_; }

  // UniformRandomBitGenerator, for std::shuffle and friends.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t key_;
  std::uint64_t state_[4];
  std::optional<double> spare_normal_;
};

/// SplitMix64 finalizer; also used to derive stream keys from labels.
std::uint64_t mix64(std::uint64_t x);

}  // namespace muvsim
