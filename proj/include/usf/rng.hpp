#pragma once

#include <array>
#include <cstdint>

namespace usf {

using Block = std::array<std::uint32_t, 4>;

/// Philox4x32-10 block function.
Block philox4x32(Block ctr, std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Reproducible stream keyed by (master_seed, stream_id).
///
/// The seed is the Philox key and the stream id fills the upper counter
/// words, so distinct pairs never share a counter block. Copies replay.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  /// Number of 32-bit words consumed so far.
  std::uint64_t position() const { return block_ * 4 + idx_ - 4; }

  std::uint32_t next_u32() {
    if (idx_ == 4) refill();
    return buf_[static_cast<std::size_t>(idx_++)];
  }
  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, n), n >= 1 (Lemire's method).
  std::uint32_t uniform_int(std::uint32_t n) {
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
    auto lo = static_cast<std::uint32_t>(m);
    if (lo < n) {
      const std::uint32_t t = static_cast<std::uint32_t>(-n) % n;
      while (lo < t) {
        m = static_cast<std::uint64_t>(next_u32()) * n;
        lo = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  /// Independent child stream, derived deterministically from this one's identity.
  RngStream child(std::uint64_t tag) const;

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  Block buf_{};
  int idx_ = 4;
};

/// Random access stacks: entry `depth` of the stack at vertex `v` is a pure
/// function of (seed, stream, v, depth). Reading order never changes values.
class KeyedStacks {
 public:
  KeyedStacks(std::uint64_t master_seed, std::uint64_t stream_id);
  int direction(std::uint64_t v, std::uint32_t depth, int ndirs) const;

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace usf
