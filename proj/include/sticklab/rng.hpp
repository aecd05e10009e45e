#pragma once

// Philox4x32-10 (Salmon et al., SC'11). The 128-bit counter is split into a
// 32-bit draw index, a 32-bit cell id and a 64-bit replicate index, so every
// (seed, replicate, cell) triple owns a disjoint stream.

#include <array>
#include <cstdint>
#include <limits>

namespace sticklab {

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

// child(seed, i): stream of replicate i.
inline StreamKey child(std::uint64_t seed, std::uint64_t i) { return {seed, i}; }

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                                  std::array<std::uint32_t, 2> k) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(M0) * c[0];
    const std::uint64_t p1 = std::uint64_t(M1) * c[2];
    const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += W0;
    k[1] += W1;
  }
  return c;
}

class Philox {
 public:
  using result_type = std::uint32_t;

  Philox(StreamKey key, std::uint32_t cell)
      : key_{std::uint32_t(key.seed), std::uint32_t(key.seed >> 32)},
        ctr_{0u, cell, std::uint32_t(key.replicate), std::uint32_t(key.replicate >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 4) {
      buf_ = philox4x32_10(ctr_, key_);
      ++ctr_[0];
      pos_ = 0;
    }
    return buf_[pos_++];
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

// 53-bit uniform on [0, 1).
template <class G>
double uniform01(G& g) {
  const std::uint64_t a = g() >> 5, b = g() >> 6;
  return (double(a) * 67108864.0 + double(b)) * (1.0 / 9007199254740992.0);
}

}  // namespace sticklab
