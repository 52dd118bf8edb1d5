#include "usf/rng.hpp"

namespace usf {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 2> key_from(std::uint64_t x) {
  return {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(x >> 32)};
}

}  // namespace

Block philox4x32(Block c, std::array<std::uint32_t, 2> k) {
  for (int r = 0; r < 10; ++r) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : seed_(master_seed), stream_(stream_id), key_(key_from(master_seed)) {}

void RngStream::refill() {
  const Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                  static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  buf_ = philox4x32(ctr, key_);
  ++block_;
  idx_ = 0;
}

RngStream RngStream::child(std::uint64_t tag) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(stream_ + 0x632BE59BD9B4E019ull)), splitmix64(tag));
}

KeyedStacks::KeyedStacks(std::uint64_t master_seed, std::uint64_t stream_id)
    : key_(key_from(splitmix64(master_seed ^ 0x5851F42D4C957F2Dull) ^ splitmix64(stream_id))) {}

int KeyedStacks::direction(std::uint64_t v, std::uint32_t depth, int ndirs) const {
  const auto n = static_cast<std::uint32_t>(ndirs);
  const std::uint32_t t = static_cast<std::uint32_t>(-n) % n;
  for (std::uint32_t tag = 0;; ++tag) {
    const Block b = philox4x32({depth, static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v >> 32), tag}, key_);
    for (std::uint32_t w : b) {
      const std::uint64_t m = static_cast<std::uint64_t>(w) * n;
      if (static_cast<std::uint32_t>(m) >= t) return static_cast<int>(m >> 32);
    }
  }
}

}  // namespace usf
