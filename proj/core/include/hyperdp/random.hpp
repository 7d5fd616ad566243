#ifndef HYPERDP_RANDOM_HPP
#define HYPERDP_RANDOM_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace hyperdp {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection on
/// 128-bit counters.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

/// Seedable random stream over Philox4x32-10.
///
/// The key is the 64-bit seed and the upper half of the counter is the stream
/// index, so `RngStream(seed, r)` for distinct r are independent streams that
/// reproduce bit-for-bit on every platform. Satisfies
/// UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 52 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept;
  double normal() noexcept;
  /// Logarithm of a Gamma(shape, 1) variate; accurate for tiny shapes where
  /// the variate itself underflows.
  double log_gamma_variate(double shape) noexcept;
  double gamma(double shape) noexcept;
  /// Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
  double beta(double a, double b) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  unsigned used_ = 2;  // 64-bit outputs consumed from buffer_, two per block
};

}  // namespace hyperdp

#endif  // HYPERDP_RANDOM_HPP
