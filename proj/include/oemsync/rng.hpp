#pragma once

#include <cstdint>
#include <limits>

namespace oemsync {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based 64-bit generator. Draw n of the stream keyed by `seed` is
///
///   mix64(key + n * 0x9e3779b97f4a7c15),  key = mix64(seed ^ 0x6a09e667f3bcc909),
///
/// i.e. SplitMix64 evaluated at an explicit counter. A trajectory with seed s
/// always owns the stream keyed by s, independent of which thread runs it or
/// in which order, which is what makes ensembles reproducible across thread
/// counts.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform in the open interval (0, 1), 53-bit resolution.
  constexpr double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace oemsync
