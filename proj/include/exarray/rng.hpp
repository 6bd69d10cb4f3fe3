#ifndef EXARRAY_RNG_HPP
#define EXARRAY_RNG_HPP

#include <array>
#include <cstdint>

namespace exarray {

/**
 * Philox4x32-10 (Salmon et al., SC'11). A keyed bijection of 128-bit
 * counters; every random number in the library is a pure function of
 * (key, counter), so streams are reproducible bit-for-bit on any platform
 * and can be evaluated in any order.
 */
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Identifies an independent family of uniforms derived from a seed.
enum class Role : std::uint32_t {
  Global = 1,
  RowLatent = 2,
  ColumnLatent = 3,
  EntryNoise = 4,
  Run = 5,
  Step = 6,
  Event = 7,
  Draw = 8,
  Type = 9,
  Permutation = 10,
  Bootstrap = 11,
  Alternate = 12,
};

/**
 * Derives a child key from a parent key, a role and an index. Children
 * with different (role, index) are independent streams.
 */
std::uint64_t derive_key(std::uint64_t parent, Role role, std::uint64_t index = 0);

/// Random-access uniform in [0, 1) at counter (a, b) of stream `key`.
double uniform_at(std::uint64_t key, std::uint64_t a, std::uint64_t b = 0);

/// 53-bit conversion of a 64-bit word to [0, 1).
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/**
 * Sequential view of one keyed stream. Consumes the counter in order, four
 * 32-bit words per Philox block.
 */
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform() { return to_unit(next_u64()); }
  /// Uniform in (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  /// Uniform integer in [0, n); n > 0. Unbiased (rejection).
  std::uint64_t below(std::uint64_t n);
  double exponential(double rate);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace exarray

#endif  // EXARRAY_RNG_HPP
