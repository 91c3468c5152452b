#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>

#include <sodium.h>

namespace localmq {

// SplitMix64 output function; also used to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Small counter-based generator. Cheap to construct, so every natural example
// gets its own stream derived from (master seed, sequence number).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Uniform double in [0, 1) from the top 53 bits.
template <typename Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

template <typename Rng>
bool bernoulli(Rng& rng, double p) {
  return uniform01(rng) < p;
}

// Keyed pseudorandom function {0,1}^64 -> {0,1}^64 (SipHash-2-4).
class KeyedPrf {
 public:
  KeyedPrf() : KeyedPrf(0) {}
  explicit KeyedPrf(std::uint64_t seed) : KeyedPrf(seed, 0) {}
  KeyedPrf(std::uint64_t seed, std::uint64_t domain_tag) {
    static_assert(crypto_shorthash_KEYBYTES == 16);
    // sodium_init is idempotent and thread-safe; siphash itself needs no
    // initialisation but this keeps the library in a defined state.
    [[maybe_unused]] static const int init = sodium_init();
    const std::uint64_t k0 = derive_seed(seed, 2 * domain_tag + 1);
    const std::uint64_t k1 = derive_seed(seed, 2 * domain_tag + 2);
    std::memcpy(key_.data(), &k0, 8);
    std::memcpy(key_.data() + 8, &k1, 8);
  }

  std::uint64_t operator()(std::uint64_t input) const {
    unsigned char in[8];
    std::memcpy(in, &input, 8);
    unsigned char out[crypto_shorthash_BYTES];
    crypto_shorthash(out, in, sizeof in, key_.data());
    std::uint64_t v;
    std::memcpy(&v, out, 8);
    return v;
  }

  double unit(std::uint64_t input) const {
    return static_cast<double>((*this)(input) >> 11) * 0x1.0p-53;
  }

  int bit(std::uint64_t input) const {
    return static_cast<int>((*this)(input) & 1u);
  }

  // Persistent fair coin in {-1,+1}.
  double coin(std::uint64_t input) const { return bit(input) ? 1.0 : -1.0; }

 private:
  std::array<unsigned char, 16> key_{};
};

}  // namespace localmq
