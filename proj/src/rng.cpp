#include "exarray/rng.hpp"

#include <cmath>

namespace exarray {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr std::uint32_t kDeriveTag = 0x5EED0D1Eu;

Philox4x32::Key split(std::uint64_t key) {
  return {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
}

std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
  return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t derive_key(std::uint64_t parent, Role role, std::uint64_t index) {
  const auto out = Philox4x32::block(
      {static_cast<std::uint32_t>(role), static_cast<std::uint32_t>(index),
       static_cast<std::uint32_t>(index >> 32), kDeriveTag},
      split(parent));
  return join(out[0], out[1]);
}

double uniform_at(std::uint64_t key, std::uint64_t a, std::uint64_t b) {
  const auto out = Philox4x32::block(
      {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
       static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)},
      split(key));
  return to_unit(join(out[0], out[1]));
}

std::uint64_t Stream::next_u64() {
  if (used_ >= 4) {
    buffer_ = Philox4x32::block(
        {static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32), 0u,
         0u},
        split(key_));
    ++counter_;
    used_ = 0;
  }
  const std::uint64_t out = join(buffer_[used_], buffer_[used_ + 1]);
  used_ += 2;
  return out;
}

std::uint64_t Stream::below(std::uint64_t n) {
  // Reject the top partial copy of [0, n) so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x <= limit) return x % n;
  }
}

double Stream::exponential(double rate) { return -std::log(uniform_pos()) / rate; }

}  // namespace exarray
