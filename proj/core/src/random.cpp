#include "hyperdp/random.hpp"

#include <cmath>
#include <numbers>

namespace hyperdp {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// Marsaglia & Tsang (2000), shape >= 1.
double marsaglia_tsang(RngStream& rng, double shape) noexcept {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

void RngStream::refill() noexcept {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = Philox4x32::block(ctr, key);
  ++block_;
  used_ = 0;
}

RngStream::result_type RngStream::operator()() noexcept {
  if (used_ >= 2) refill();
  const std::uint64_t lo = buffer_[2 * used_];
  const std::uint64_t hi = buffer_[2 * used_ + 1];
  ++used_;
  return (hi << 32) | lo;
}

double RngStream::uniform() noexcept {
  // (k + 0.5) / 2^52 for k in [0, 2^52): exactly representable, never 0 or 1.
  const std::uint64_t k = (*this)() >> 12;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-52;
}

std::size_t RngStream::uniform_index(std::size_t n) noexcept {
  const std::uint64_t range = n;
  const std::uint64_t threshold = (0 - range) % range;  // 2^64 mod n
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x < threshold);
  return static_cast<std::size_t>(x % range);
}

double RngStream::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::log_gamma_variate(double shape) noexcept {
  if (shape >= 1.0) return std::log(marsaglia_tsang(*this, shape));
  // Gamma(a) = Gamma(a + 1) * U^(1/a), kept in log space.
  const double g = marsaglia_tsang(*this, shape + 1.0);
  return std::log(g) + std::log(uniform()) / shape;
}

double RngStream::gamma(double shape) noexcept { return std::exp(log_gamma_variate(shape)); }

double RngStream::beta(double a, double b) noexcept {
  const double lx = log_gamma_variate(a);
  const double ly = log_gamma_variate(b);
  // X / (X + Y) = 1 / (1 + exp(ly - lx))
  const double diff = ly - lx;
  if (diff > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(diff));
}

}  // namespace hyperdp
