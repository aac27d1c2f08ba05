#pragma once

#include <cstdint>
#include <limits>

namespace dpotts {

/// SplitMix64 finalizer. Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ (mix64(b) + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

/// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based generator: the n-th output is a pure function of (key, n).
/// Streams are derived by hashing, so any (seed, stream) pair reproduces the
/// same sequence regardless of which thread draws it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(hash_combine(mix64(seed), stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return at(counter_++); }

  /// Output at an arbitrary counter position; does not advance the stream.
  result_type at(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter * 0xd1b54a32d192ed03ULL));
  }

  double uniform() noexcept { return to_unit((*this)()); }

  /// Uniform integer in [0, n); n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept {
    __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<__uint128_t>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Independent child stream.
  CounterRng split(std::uint64_t stream) const noexcept {
    CounterRng child(0);
    child.key_ = hash_combine(key_, stream ^ 0xa0761d6478bd642fULL);
    return child;
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dpotts
