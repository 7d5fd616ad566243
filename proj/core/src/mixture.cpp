#include "hyperdp/mixture.hpp"

#include <algorithm>

#include "hyperdp/error.hpp"

namespace hyperdp {

DiscreteMeasure urn_predictive(const UrnState& state) {
  if (!(state.a > 0.0)) throw Error(ErrorCode::InvalidArgument, "urn precision must be positive");
  const DiscreteMeasure base = normalize(state.base);
  const double denom = state.a + static_cast<double>(state.drawn.size());
  DiscreteMeasure out(base.space());
  for (const auto& [x, m] : base.points()) out.add(x, state.a * m / denom);
  for (const auto& x : state.drawn) {
    if (!base.space().contains(x)) throw Error(ErrorCode::OutsideDomain, "drawn value outside the base's space");
    out.add(x, 1.0 / denom);
  }
  return out;
}

std::vector<std::size_t> sample_partition(double a, const DiscreteMeasure& base, std::size_t n, RngStream& rng) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "urn precision must be positive");
  const MeasureSampler draw(base);
  return class_labels(sample_urn<Assignment>(a, n, rng, [&](RngStream& r) { return draw(r); }));
}

std::vector<std::size_t> sample_partition(double a, const ContinuousBase& base, std::size_t n, RngStream& rng) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "urn precision must be positive");
  return class_labels(sample_urn<double>(a, n, rng, base.sample));
}

double expected_clusters(double a, std::size_t n) {
  if (!(a > 0.0) || n == 0) throw Error(ErrorCode::InvalidArgument, "expected_clusters needs a > 0 and n >= 1");
  double s = 0.0;
  for (std::size_t i = 1; i <= n; ++i) s += a / (a + static_cast<double>(i - 1));
  return s;
}

void LikelihoodTable::set(const Assignment& parameter, const Assignment& observation, double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "likelihood entries must lie in [0, 1]");
  }
  table_[{parameter, observation}] = probability;
}

double LikelihoodTable::operator()(const Assignment& observation, const Assignment& parameter) const {
  auto it = table_.find({parameter, observation});
  return it == table_.end() ? 0.0 : it->second;
}

Likelihood symmetric_noise(const ProductSpace& space, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1)");
  std::vector<double> miss;
  for (const auto& d : space.domains()) {
    miss.push_back(d.size() > 1 ? epsilon / static_cast<double>(d.size() - 1) : 0.0);
  }
  return [miss, epsilon](const Assignment& obs, const Assignment& param) {
    double p = 1.0;
    for (std::size_t i = 0; i < obs.size(); ++i) p *= obs[i] == param[i] ? (miss[i] == 0.0 ? 1.0 : 1.0 - epsilon) : miss[i];
    return p;
  };
}

Assignment gibbs_reassign(std::size_t i, std::span<const Assignment> parameters, std::span<const Assignment> data,
                          const Likelihood& likelihood, double a, const DiscreteMeasure& base, RngStream& rng) {
  if (i >= data.size() || parameters.size() != data.size()) {
    throw Error(ErrorCode::InvalidArgument, "observation index or parameter count out of range");
  }
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "precision must be positive");
  const Assignment& x = data[i];
  const double base_total = base.total();
  if (!(base_total > 0.0)) throw Error(ErrorCode::ZeroMass, "base has zero mass");

  std::vector<const Assignment*> candidates;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (std::size_t j = 0; j < parameters.size(); ++j) {
    if (j == i) continue;
    const double w = likelihood(x, parameters[j]);
    if (w <= 0.0) continue;
    acc += w;
    candidates.push_back(&parameters[j]);
    cumulative.push_back(acc);
  }
  for (const auto& [pi, m] : base.points()) {
    const double w = a * (m / base_total) * likelihood(x, pi);
    if (w <= 0.0) continue;
    acc += w;
    candidates.push_back(&pi);
    cumulative.push_back(acc);
  }
  if (!(acc > 0.0)) {
    throw Error(ErrorCode::ZeroReweightedMass, "observation " + std::to_string(i) +
                                                   " has zero likelihood under every candidate parameter");
  }
  const double u = rng.uniform() * acc;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return *candidates[static_cast<std::size_t>(it - cumulative.begin())];
}

MixtureFit run_gibbs(std::span<const Assignment> data, const Likelihood& likelihood, double a,
                     const DiscreteMeasure& base, std::size_t sweeps, RngStream& rng) {
  if (data.empty()) throw Error(ErrorCode::InvalidArgument, "mixture needs at least one observation");
  if (base.points().empty()) throw Error(ErrorCode::ZeroMass, "base has zero mass");
  auto mode = std::max_element(base.points().begin(), base.points().end(),
                               [](const auto& l, const auto& r) { return l.second < r.second; });
  MixtureFit fit;
  fit.parameters.assign(data.size(), mode->first);
  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      fit.parameters[i] = gibbs_reassign(i, fit.parameters, data, likelihood, a, base, rng);
    }
    const auto labels = class_labels(fit.parameters);
    fit.trace.push_back(labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1);
  }
  fit.labels = class_labels(fit.parameters);
  const std::size_t k = *std::max_element(fit.labels.begin(), fit.labels.end()) + 1;
  fit.class_counts.assign(k, 0);
  for (std::size_t l : fit.labels) ++fit.class_counts[l];
  return fit;
}

}  // namespace hyperdp
