#ifndef HYPERDP_RECONCILE_HPP
#define HYPERDP_RECONCILE_HPP

#include <optional>
#include <string_view>
#include <utility>

#include "hyperdp/measure.hpp"

namespace hyperdp {

// Repairs for pairs of clique measures μ on A and λ on B that disagree on
// their overlap C = A ∩ B. Results live on A's variables followed by B \ A.

enum class ReconcileKind {
  RescaleMin,
  RescaleConvex,
  ConditionOnA,
  ConditionOnB,
  WeightedAverage,
  KlCompromise,
};

struct ReconcileStrategy {
  ReconcileKind kind = ReconcileKind::KlCompromise;
  std::optional<double> gamma;

  /// Names: rescale-min, rescale-convex, condition-a, condition-b, average, kl.
  /// Throws InvalidArgument on an unknown name, a gamma outside [0, 1], or a
  /// gamma given to / missing from a strategy. `average` alone may omit gamma
  /// (the mass-weighted default is used).
  static ReconcileStrategy parse(std::string_view name, std::optional<double> gamma);
  void validate() const;
};

std::string_view strategy_name(ReconcileKind kind) noexcept;

/// Equalizes total masses of two measures with proportional overlap
/// marginals: rescale-min uses min(μ(X_A), λ(X_B)), rescale-convex uses
/// γ μ(X_A) + (1 - γ) λ(X_B). Throws ConditionViolated when the normalized
/// overlap marginals differ.
std::pair<DiscreteMeasure, DiscreteMeasure> rescale(const DiscreteMeasure& mu, const DiscreteMeasure& lambda,
                                                    const ReconcileStrategy& strategy);

enum class Side { A, B };

/// Side A: α(u, v, w) = μ(u, w) λ(v | w). Side B: α(u, v, w) = μ(u | w) λ(v, w).
/// Throws ZeroConditional where the chosen side has separator mass the other
/// side cannot condition on.
DiscreteMeasure complete_via(const DiscreteMeasure& mu, const DiscreteMeasure& lambda, Side side);

/// γ α^A + (1 - γ) α^B, with γ ∈ [0, 1].
DiscreteMeasure weighted_average(const DiscreteMeasure& mu, const DiscreteMeasure& lambda, double gamma);

/// μ(X_A) / (μ(X_A) + λ(X_B)): weights the better-informed measure more.
double mass_weighted_gamma(const DiscreteMeasure& mu, const DiscreteMeasure& lambda);

/// KL(p ‖ q) + KL(r ‖ q) over a common space, with 0 log 0 = 0. Infinite when
/// q vanishes where p or r does not.
double summed_kl(const DiscreteMeasure& p, const DiscreteMeasure& r, const DiscreteMeasure& q);

/// argmin_q KL(μ̄_C ‖ q) + KL(λ̄_C ‖ q) over probability measures on C: the
/// equal mixture (μ̄_C + λ̄_C) / 2.
DiscreteMeasure kl_separator_compromise(const DiscreteMeasure& mu, const DiscreteMeasure& lambda);

/// α(u, v, w) = μ(u | w) α_C(w) λ(v | w) with α_C the KL compromise; a
/// probability measure.
DiscreteMeasure kl_compromise(const DiscreteMeasure& mu, const DiscreteMeasure& lambda);

}  // namespace hyperdp

#endif  // HYPERDP_RECONCILE_HPP
