#ifndef HYPERDP_DIRICHLET_PROCESS_HPP
#define HYPERDP_DIRICHLET_PROCESS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hyperdp/measure.hpp"
#include "hyperdp/random.hpp"

namespace hyperdp {

/// DP(ν G): precision ν > 0 and a base probability measure G.
struct DPParams {
  double nu = 1.0;
  DiscreteMeasure base;
};

/// Validates ν > 0 and that `base` is a probability measure (|mass - 1| <= 1e-12).
DPParams make_dp_params(double nu, DiscreteMeasure base);

/// Base distribution known only through a sampler and, optionally, its CDF.
/// Such bases are treated as atomless.
struct ContinuousBase {
  std::function<double(RngStream&)> sample;
  std::function<double(double)> cdf;
};

ContinuousBase uniform_base(double lo, double hi);

struct SamplerConfig {
  std::uint64_t seed = 0;
  double eps = 1e-10;
  std::size_t max_atoms = 10000;

  /// Throws InvalidArgument unless eps ∈ (0, 1) and max_atoms >= 1.
  void validate() const;
};

/// A realized random measure Σ w_i δ_{Z_i}.
template <class Atom>
struct WeightedAtoms {
  std::vector<Atom> atoms;
  std::vector<double> weights;
  /// Stick mass left when the construction stopped; it sits on the last atom.
  double truncation_residual = 0.0;
  /// True when max_atoms stopped the construction before the eps criterion.
  bool capped = false;
};

using DiscreteAtoms = WeightedAtoms<Assignment>;
using RealAtoms = WeightedAtoms<double>;

/// Categorical sampler over a measure's support (inverse CDF over the
/// support in map order).
class MeasureSampler {
 public:
  explicit MeasureSampler(const DiscreteMeasure& m);
  const Assignment& operator()(RngStream& rng) const;

 private:
  std::vector<Assignment> atoms_;
  std::vector<double> cumulative_;
};

/// Truncated stick-breaking: p_k ~ Beta(1, ν), w_k = p_k Π_{i<k} (1 - p_i).
/// Stops once the leftover stick drops below cfg.eps or max_atoms - 1 sticks
/// were broken; the leftover goes to one final fresh atom.
template <class Atom, class Draw>
WeightedAtoms<Atom> stick_breaking(double nu, const SamplerConfig& cfg, RngStream& rng, Draw&& draw) {
  WeightedAtoms<Atom> out;
  double remaining = 1.0;
  while (remaining >= cfg.eps) {
    if (out.atoms.size() + 1 >= cfg.max_atoms) {
      out.capped = true;
      break;
    }
    const double p = rng.beta(1.0, nu);
    const double w = remaining * p;
    Atom z = draw(rng);
    if (w > 0.0) {
      out.atoms.push_back(std::move(z));
      out.weights.push_back(w);
    }
    remaining -= w;
  }
  if (remaining > 0.0) {
    out.atoms.push_back(draw(rng));
    out.weights.push_back(remaining);
  }
  out.truncation_residual = remaining;
  return out;
}

DiscreteAtoms sample_dp(const DPParams& params, const SamplerConfig& cfg, RngStream& rng);
/// Uses stream `replicate` of cfg.seed.
DiscreteAtoms sample_dp(const DPParams& params, const SamplerConfig& cfg, std::uint64_t replicate = 0);
RealAtoms sample_dp(double nu, const ContinuousBase& base, const SamplerConfig& cfg, RngStream& rng);

/// Aggregates equal atoms into a measure on `space`.
DiscreteMeasure to_measure(const DiscreteAtoms& theta, const ProductSpace& space);

/// A set of full assignments of the base's space.
using Event = std::vector<Assignment>;

/// Dirichlet parameters (νG(A_1), ..., νG(A_k)) of the law of
/// (θ(A_1), ..., θ(A_k)). Throws InvalidPartition unless the events are
/// disjoint and cover the space.
std::vector<double> finite_partition_law(const DPParams& params, const std::vector<Event>& partition);

/// DP(ν, G_B). Throws UnknownVariable.
DPParams dp_marginal(const DPParams& params, const std::vector<std::string>& vars);

/// Conjugate update: ν' = ν + n, G' = (νG + Σ δ_{X_i}) / (ν + n).
/// Throws OutsideDomain.
DPParams dp_posterior(const DPParams& params, std::span<const Assignment> data);

/// Prior for a one-dimensional real quantity: precision and base CDF.
struct CdfPrior {
  double nu = 1.0;
  std::function<double(double)> base_cdf;
};

/// Prior CDF of a single-variable base whose categories parse as reals.
CdfPrior grid_prior(const DPParams& params);

/// Fraction of sorted data <= t.
double empirical_cdf(std::span<const double> sorted_data, double t);

/// Posterior mean of F(t) as a convex combination (1 - w) Ḡ(t) + w F̂(t),
/// w = n / (ν + n). `sorted_data` must be ascending.
double bayes_cdf(const CdfPrior& prior, std::span<const double> sorted_data, double t);
/// Same estimate in ratio form (ν Ḡ(t) + #{X_i <= t}) / (ν + n).
double bayes_cdf_ratio(const CdfPrior& prior, std::span<const double> sorted_data, double t);

}  // namespace hyperdp

#endif  // HYPERDP_DIRICHLET_PROCESS_HPP
