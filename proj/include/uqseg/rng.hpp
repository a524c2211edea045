#pragma once
// Counter-based deterministic randomness built on Philox4x32-10.
//
// Every draw is a pure function of (seed, stream, index), so parallel and
// serial execution of the same workload produce bit-identical results. The
// generator is pinned by the published Philox known-answer vectors (checked
// in the unit tests); the exact derived-sampler contracts are:
//   word(i)    -> Philox block {lo32(i/4), hi32(i/4), lo32(stream),
//                 hi32(stream)} under key {lo32(seed), hi32(seed)},
//                 word index i % 4
//   below(i,n) -> (uint64(word(i)) * n) >> 32
//   unit(i)    -> ((word(2i) << 32 | word(2i+1)) >> 11) * 2^-53   in [0,1)
//   normal(i)  -> Box-Muller on (1 - unit(2i), unit(2i+1))

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace uqseg {

struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
      ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
             std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    }
    return ctr;
  }
};

// Stateless view of one random stream: any word can be addressed directly.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, stream_(stream) {}

  std::uint32_t word(std::uint64_t i) const {
    const std::uint64_t blk = i >> 2;
    const auto out = Philox4x32::block(
        {std::uint32_t(blk), std::uint32_t(blk >> 32), std::uint32_t(stream_),
         std::uint32_t(stream_ >> 32)},
        key_);
    return out[i & 3];
  }

  std::uint32_t below(std::uint64_t i, std::uint32_t n) const {
    return std::uint32_t((std::uint64_t(word(i)) * n) >> 32);
  }

  double unit(std::uint64_t i) const {
    const std::uint64_t hi = word(2 * i);
    const std::uint64_t lo = word(2 * i + 1);
    return double(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }

  double normal(std::uint64_t i) const {
    const double u1 = 1.0 - unit(2 * i);  // (0, 1], keeps log() finite
    const double u2 = unit(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
};

// Sequential facade over CounterRng for code that draws in a fixed order.
class SeqRng {
 public:
  SeqRng(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  std::uint32_t word() { return rng_.word(next_++); }

  std::uint32_t below(std::uint32_t n) {
    return std::uint32_t((std::uint64_t(word()) * n) >> 32);
  }

  double unit() {
    const std::uint64_t hi = word();
    const std::uint64_t lo = word();
    return double(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = 1.0 - unit();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (splitmix64(b) + 0x9E3779B97F4A7C15ull + (a << 6) +
                         (a >> 2)));
}

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return mix_seed(mix_seed(a, b), static_cast<std::uint64_t>(rest)...);
}

}  // namespace uqseg
