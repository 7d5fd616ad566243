#include "hyperdp/dirichlet_process.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <string>

#include "hyperdp/error.hpp"

namespace hyperdp {

DPParams make_dp_params(double nu, DiscreteMeasure base) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorCode::InvalidArgument, "precision nu must be positive");
  if (!base.is_probability()) {
    throw Error(ErrorCode::InvalidArgument, "base measure must be a probability measure (total mass " +
                                                std::to_string(base.total()) + ")");
  }
  return DPParams{nu, std::move(base)};
}

ContinuousBase uniform_base(double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "uniform base needs lo < hi");
  return ContinuousBase{
      [lo, hi](RngStream& rng) { return lo + (hi - lo) * rng.uniform(); },
      [lo, hi](double t) { return std::clamp((t - lo) / (hi - lo), 0.0, 1.0); },
  };
}

void SamplerConfig::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  if (max_atoms < 1) throw Error(ErrorCode::InvalidArgument, "max_atoms must be at least 1");
}

MeasureSampler::MeasureSampler(const DiscreteMeasure& m) {
  double acc = 0.0;
  for (const auto& [x, mass] : m.points()) {
    acc += mass;
    atoms_.push_back(x);
    cumulative_.push_back(acc);
  }
  if (atoms_.empty()) throw Error(ErrorCode::ZeroMass, "cannot sample from a zero measure");
}

const Assignment& MeasureSampler::operator()(RngStream& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return atoms_[static_cast<std::size_t>(it - cumulative_.begin())];
}

DiscreteAtoms sample_dp(const DPParams& params, const SamplerConfig& cfg, RngStream& rng) {
  cfg.validate();
  const MeasureSampler draw(params.base);
  return stick_breaking<Assignment>(params.nu, cfg, rng, [&](RngStream& r) { return draw(r); });
}

DiscreteAtoms sample_dp(const DPParams& params, const SamplerConfig& cfg, std::uint64_t replicate) {
  RngStream rng(cfg.seed, replicate);
  return sample_dp(params, cfg, rng);
}

RealAtoms sample_dp(double nu, const ContinuousBase& base, const SamplerConfig& cfg, RngStream& rng) {
  cfg.validate();
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "precision nu must be positive");
  return stick_breaking<double>(nu, cfg, rng, [&](RngStream& r) { return base.sample(r); });
}

DiscreteMeasure to_measure(const DiscreteAtoms& theta, const ProductSpace& space) {
  DiscreteMeasure m(space);
  for (std::size_t i = 0; i < theta.atoms.size(); ++i) m.add(theta.atoms[i], theta.weights[i]);
  return m;
}

std::vector<double> finite_partition_law(const DPParams& params, const std::vector<Event>& partition) {
  const ProductSpace& space = params.base.space();
  std::set<Assignment> seen;
  std::vector<double> out;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    double mass = 0.0;
    for (const auto& x : partition[i]) {
      if (!space.contains(x)) {
        throw Error(ErrorCode::InvalidPartition, "event " + std::to_string(i + 1) + " leaves the space");
      }
      if (!seen.insert(x).second) {
        throw Error(ErrorCode::InvalidPartition, "events overlap (event " + std::to_string(i + 1) + ")");
      }
      mass += params.base.at(x);
    }
    out.push_back(params.nu * mass);
  }
  if (seen.size() != space.cardinality()) {
    throw Error(ErrorCode::InvalidPartition, "events do not cover the space");
  }
  return out;
}

DPParams dp_marginal(const DPParams& params, const std::vector<std::string>& vars) {
  return DPParams{params.nu, marginalize(params.base, vars)};
}

DPParams dp_posterior(const DPParams& params, std::span<const Assignment> data) {
  if (data.empty()) return params;
  const ProductSpace& space = params.base.space();
  DiscreteMeasure unnormalized(space);
  for (const auto& [x, mass] : params.base.points()) unnormalized.add(x, params.nu * mass);
  for (const auto& x : data) {
    if (!space.contains(x)) throw Error(ErrorCode::OutsideDomain, "observation outside the base's space");
    unnormalized.add(x, 1.0);
  }
  const double nu_post = params.nu + static_cast<double>(data.size());
  DiscreteMeasure base(space);
  for (const auto& [x, mass] : unnormalized.points()) base.add(x, mass / nu_post);
  return DPParams{nu_post, std::move(base)};
}

CdfPrior grid_prior(const DPParams& params) {
  const ProductSpace& space = params.base.space();
  if (space.dimension() != 1) throw Error(ErrorCode::InvalidArgument, "CDF estimation needs a single variable");
  std::vector<std::pair<double, double>> grid;
  for (const auto& [x, mass] : params.base.points()) {
    const std::string& label = space.domain(0)[x[0]];
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
    if (ec != std::errc() || ptr != label.data() + label.size()) {
      throw Error(ErrorCode::InvalidArgument, "category '" + label + "' is not a real number");
    }
    grid.emplace_back(value, mass);
  }
  std::sort(grid.begin(), grid.end());
  return CdfPrior{params.nu, [grid = std::move(grid)](double t) {
                    double acc = 0.0;
                    for (const auto& [v, m] : grid) {
                      if (v > t) break;
                      acc += m;
                    }
                    return std::min(acc, 1.0);
                  }};
}

double empirical_cdf(std::span<const double> sorted_data, double t) {
  if (sorted_data.empty()) return 0.0;
  const auto k = std::upper_bound(sorted_data.begin(), sorted_data.end(), t) - sorted_data.begin();
  return static_cast<double>(k) / static_cast<double>(sorted_data.size());
}

double bayes_cdf(const CdfPrior& prior, std::span<const double> sorted_data, double t) {
  const double n = static_cast<double>(sorted_data.size());
  const double w = n / (prior.nu + n);
  return (1.0 - w) * prior.base_cdf(t) + w * empirical_cdf(sorted_data, t);
}

double bayes_cdf_ratio(const CdfPrior& prior, std::span<const double> sorted_data, double t) {
  const double n = static_cast<double>(sorted_data.size());
  const auto below = std::upper_bound(sorted_data.begin(), sorted_data.end(), t) - sorted_data.begin();
  return (prior.nu * prior.base_cdf(t) + static_cast<double>(below)) / (prior.nu + n);
}

}  // namespace hyperdp
