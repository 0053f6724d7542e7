#pragma once

#include <cstdint>
#include <random>

namespace rfim {

/// Purpose tags used when deriving independent streams from one master seed.
enum class StreamTag : std::uint64_t {
  field = 1,
  chain_plus = 2,
  chain_minus = 3,
  measurement = 4,
  replica = 5,
  search = 6,
  test = 7,
};

/// SplitMix64 finalizer: a bijective 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hash a derivation path into a 64-bit key. Distinct paths give unrelated keys.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  std::uint64_t k = mix64(master);
  k = mix64(k ^ mix64(a + 0x632be59bd9b4e019ULL));
  k = mix64(k ^ mix64(b + 0x8cb92ba72f3d8dd7ULL));
  k = mix64(k ^ mix64(c + 0xd1b54a32d192ed03ULL));
  return k;
}

constexpr std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  return derive_seed(master, static_cast<std::uint64_t>(tag), b, c);
}

/// Map 64 random bits to a double in [0, 1).
constexpr double bits_to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/// Map 64 random bits to a double in (0, 1].
constexpr double bits_to_open_unit(std::uint64_t x) {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal value addressed by (key, counter); recomputable in isolation.
double counter_normal(std::uint64_t key, std::uint64_t counter);

/// Sequential generator for Markov chains. The engine is fully specified by the
/// standard, and the conversions below are our own, so streams are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return bits_to_unit(engine_()); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rfim
