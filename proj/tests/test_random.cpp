#include <doctest.h>

#include <cmath>
#include <vector>

#include "hyperdp/random.hpp"

using hyperdp::Philox4x32;
using hyperdp::RngStream;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("uniform stays strictly inside the unit interval") {
  RngStream rng(1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("uniform_index covers its range evenly") {
  RngStream rng(9);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) CHECK(std::abs(c - n / 7) < 4.0 * std::sqrt(n / 7.0));
}

TEST_CASE("gamma and beta moments") {
  RngStream rng(2);
  for (double shape : {0.3, 1.0, 4.5}) {
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      REQUIRE(g >= 0.0);
      s += g;
      s2 += g * g;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean - shape) < 5.0 * std::sqrt(shape / n));
    CHECK(std::abs(var - shape) / shape < 0.05);
  }
  for (auto [a, b] : {std::pair{1.0, 4.0}, std::pair{1.0, 0.2}, std::pair{2.5, 2.5}}) {
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.beta(a, b);
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
      s += x;
    }
    const double mean = a / (a + b);
    const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1)));
    CHECK(std::abs(s / n - mean) < 5.0 * sd / std::sqrt(n));
  }
}

TEST_CASE("normal moments") {
  RngStream rng(3);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}
