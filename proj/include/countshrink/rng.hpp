#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace countshrink {

// SplitMix64 finalizer; used to derive well-separated seeds from
// (master_seed, stream index) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream keyed by (master_seed, stream). Child streams
// are derived with split(), so parallel tasks get independent sequences that
// do not depend on scheduling order.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream = 0)
      : key_(mix64(mix64(master_seed) ^ mix64(stream + 0x632be59bd9b4e019ULL))) {
    std::uint64_t s = key_;
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(s = mix64(s)),
                      static_cast<std::uint32_t>(s >> 32)};
    engine_.seed(seq);
  }

  RngStream split(std::uint64_t child) const { return RngStream(key_, child); }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    double u;
    do {
      u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    } while (u == 0.0);
    return u;
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace countshrink
