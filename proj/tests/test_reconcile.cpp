#include <doctest.h>

#include "generators.hpp"
#include "hyperdp/error.hpp"
#include "hyperdp/reconcile.hpp"
#include "oracles.hpp"

using namespace hyperdp;

namespace {

ProductSpace binary(std::vector<std::string> vars) {
  std::vector<std::vector<std::string>> doms(vars.size(), {"0", "1"});
  return ProductSpace(std::move(vars), std::move(doms));
}

/// μ on (U, W) with W-marginal (0.6, 0.4); λ on (W, V) with W-marginal (0.5, 0.5).
std::pair<DiscreteMeasure, DiscreteMeasure> shifted_pair() {
  DiscreteMeasure mu(binary({"U", "W"}));
  mu.add({0, 0}, 0.2);
  mu.add({1, 0}, 0.4);
  mu.add({0, 1}, 0.1);
  mu.add({1, 1}, 0.3);
  DiscreteMeasure lambda(binary({"W", "V"}));
  lambda.add({0, 0}, 0.25);
  lambda.add({0, 1}, 0.25);
  lambda.add({1, 0}, 0.4);
  lambda.add({1, 1}, 0.1);
  return {mu, lambda};
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

const CliqueDecomposition& uwv() {
  static const auto d = two_clique_decomposition({"U", "W"}, {"W", "V"});
  return d;
}

}  // namespace

TEST_CASE("strategy parsing") {
  CHECK(ReconcileStrategy::parse("kl", std::nullopt).kind == ReconcileKind::KlCompromise);
  CHECK(ReconcileStrategy::parse("average", std::nullopt).kind == ReconcileKind::WeightedAverage);
  CHECK(code_of([] { ReconcileStrategy::parse("rescale-convex", std::nullopt); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ReconcileStrategy::parse("kl", 0.5); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ReconcileStrategy::parse("average", 1.5); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ReconcileStrategy::parse("nearest", std::nullopt); }) == ErrorCode::InvalidArgument);
  CHECK(strategy_name(ReconcileKind::ConditionOnB) == "condition-b");
}

TEST_CASE("rescaling equalizes masses without changing shapes") {
  const auto mu = scale(DiscreteMeasure::uniform(binary({"U", "W"})), 2.0);
  const auto lambda = scale(DiscreteMeasure::uniform(binary({"W", "V"})), 3.0);
  auto [m1, l1] = rescale(mu, lambda, ReconcileStrategy::parse("rescale-min", std::nullopt));
  CHECK(m1.total() == doctest::Approx(2.0));
  CHECK(l1.total() == doctest::Approx(2.0));
  auto [m2, l2] = rescale(mu, lambda, ReconcileStrategy::parse("rescale-convex", 0.5));
  CHECK(m2.total() == doctest::Approx(2.5));
  CHECK(l2.total() == doctest::Approx(2.5));
  CHECK(is_consistent(m2, l2).consistent());
  auto [m3, l3] = rescale(mu, scale(lambda, 2.0 / 3.0), ReconcileStrategy::parse("rescale-min", std::nullopt));
  CHECK(linf_distance(m3, mu) == 0.0);
  CHECK(l3.total() == doctest::Approx(2.0));
  const auto [a, b] = shifted_pair();
  CHECK(code_of([&] { rescale(a, b, ReconcileStrategy::parse("rescale-min", std::nullopt)); }) ==
        ErrorCode::ConditionViolated);
}

TEST_CASE("completions inherit the chosen side's marginal") {
  const auto [mu, lambda] = shifted_pair();
  const auto a = complete_via(mu, lambda, Side::A);
  const auto b = complete_via(mu, lambda, Side::B);
  CHECK(linf_distance(marginalize(a, {"U", "W"}), mu) < 1e-15);
  CHECK(linf_distance(marginalize(b, {"W", "V"}), lambda) < 1e-15);
  const auto wa = marginalize(a, {"W"});
  CHECK(wa.at({0}) == doctest::Approx(0.6));
  CHECK(wa.at({1}) == doctest::Approx(0.4));
  // Pointwise: α^A(u, w, v) = μ(u, w) λ(w, v) / λ(w), and λ(w) = 0.5 for both w.
  for (const auto& [x, m] : a.points()) {
    CHECK(m == doctest::Approx(mu.at({x[0], x[1]}) * lambda.at({x[1], x[2]}) / 0.5).epsilon(1e-14));
  }
}

TEST_CASE("weighted average endpoints and midpoint") {
  const auto [mu, lambda] = shifted_pair();
  const auto a = complete_via(mu, lambda, Side::A);
  const auto b = complete_via(mu, lambda, Side::B);
  CHECK(linf_distance(weighted_average(mu, lambda, 1.0), a) == 0.0);
  CHECK(linf_distance(weighted_average(mu, lambda, 0.0), b) == 0.0);
  const auto w = marginalize(weighted_average(mu, lambda, 0.5), {"W"});
  CHECK(w.at({0}) == doctest::Approx(0.55));
  CHECK(w.at({1}) == doctest::Approx(0.45));
  CHECK(mass_weighted_gamma(scale(mu, 2.0), scale(lambda, 3.0)) == doctest::Approx(0.4));
}

TEST_CASE("completion fails when the other side has no mass at a separator value") {
  DiscreteMeasure mu(binary({"U", "W"}));
  mu.add({0, 0}, 0.5);
  mu.add({0, 1}, 0.5);
  DiscreteMeasure lambda(binary({"W", "V"}));
  lambda.add({0, 0}, 1.0);
  CHECK(code_of([&] { complete_via(mu, lambda, Side::A); }) == ErrorCode::ZeroConditional);
  CHECK_NOTHROW(complete_via(mu, lambda, Side::B));
}

TEST_CASE("KL compromise on a two-category separator") {
  DiscreteMeasure mu(binary({"U", "W"}));
  mu.add({0, 0}, 0.8);
  mu.add({0, 1}, 0.2);
  DiscreteMeasure lambda(binary({"W", "V"}));
  lambda.add({0, 0}, 0.4);
  lambda.add({1, 1}, 0.6);
  const auto c = kl_separator_compromise(mu, lambda);
  CHECK(c.at({0}) == doctest::Approx(0.6));
  CHECK(c.at({1}) == doctest::Approx(0.4));
  const auto q = oracle::kl_grid_minimiser({0.8, 0.2}, {0.4, 0.6}, 1e-4);
  CHECK(std::abs(q[0] - 0.6) <= 1e-4);
  const auto alpha = kl_compromise(mu, lambda);
  CHECK(linf_distance(marginalize(alpha, {"W"}), c) < 1e-15);
}

TEST_CASE("property: every strategy returns the Markov combination on consistent inputs") {
  RngStream rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    auto [mu, lambda] = gen::consistent_pair(rng, 0.0);
    mu = normalize(mu);
    lambda = normalize(lambda);
    const auto expected = markov_combination(mu, lambda);
    REQUIRE(linf_distance(complete_via(mu, lambda, Side::A), expected) < 1e-12);
    REQUIRE(linf_distance(complete_via(mu, lambda, Side::B), expected) < 1e-12);
    REQUIRE(linf_distance(weighted_average(mu, lambda, rng.uniform()), expected) < 1e-12);
    REQUIRE(linf_distance(kl_compromise(mu, lambda), expected) < 1e-12);
    auto [m, l] = rescale(mu, lambda, ReconcileStrategy::parse("rescale-min", std::nullopt));
    REQUIRE(linf_distance(markov_combination(m, l), expected) < 1e-12);
  }
}

TEST_CASE("property: reconciled outputs are Markov and the compromise beats its inputs") {
  RngStream rng(8);
  const ProductSpace uw({"U", "W"}, {{"0", "1"}, {"0", "1", "2"}});
  const ProductSpace wv({"W", "V"}, {{"0", "1", "2"}, {"0", "1"}});
  for (int trial = 0; trial < 60; ++trial) {
    const auto mu = gen::measure(uw, rng);
    const auto lambda = gen::measure(wv, rng);
    for (const auto& out : {complete_via(mu, lambda, Side::A), complete_via(mu, lambda, Side::B),
                            weighted_average(mu, lambda, 0.3), kl_compromise(mu, lambda)}) {
      REQUIRE(normalize(out).is_probability());
      REQUIRE(is_markov(reorder(out, {"U", "W", "V"}), uwv(), 1e-12));
    }
    const auto mc = normalize(marginalize(mu, {"W"}));
    const auto lc = normalize(marginalize(lambda, {"W"}));
    const double best = summed_kl(mc, lc, kl_separator_compromise(mu, lambda));
    REQUIRE(best <= summed_kl(mc, lc, mc) + 1e-15);
    REQUIRE(best <= summed_kl(mc, lc, lc) + 1e-15);
  }
}
