#pragma once

#include <array>
#include <cstdint>

namespace gwi {

// Philox4x32-10 block cipher (Salmon et al., SC 2011).
//   http://www.thesalmons.org/john/random123/papers/random123sc11.pdf
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kW32A = 0x9E3779B9;
  static constexpr std::uint32_t kW32B = 0xBB67AE85;
  static constexpr std::uint32_t kM4x32A = 0xD2511F53;
  static constexpr std::uint32_t kM4x32B = 0xCD9E8D57;
  static constexpr int kRounds = 10;

  static constexpr Counter single_round(const Counter& ctr, const Key& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }

  static constexpr Counter encrypt(Counter ctr, Key key) {
    for (int r = 0; r < kRounds; ++r) {
      if (r > 0) {
        key[0] += kW32A;
        key[1] += kW32B;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }
};

/// Reproducible random stream keyed by (master_seed, stream_id).
///
/// Draw j of stream s is Philox(key = seed, counter = (j/2, s)); any stream
/// can be regenerated in isolation without touching the others.
class CounterStream {
 public:
  CounterStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        stream_id_(stream_id) {}

  std::uint64_t next_u64() {
    if (lane_ == 2) refill();
    return buffer_[lane_++];
  }

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double next_uniform() {
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kScale;
  }

  std::uint64_t blocks_used() const { return block_; }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  void refill() {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(stream_id_),
                                  static_cast<std::uint32_t>(stream_id_ >> 32)};
    const auto out = Philox4x32::encrypt(ctr, key_);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int lane_ = 2;
};

}  // namespace gwi
