#ifndef HYPERDP_MIXTURE_HPP
#define HYPERDP_MIXTURE_HPP

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "hyperdp/dirichlet_process.hpp"
#include "hyperdp/measure.hpp"
#include "hyperdp/random.hpp"

namespace hyperdp {

/// Values π_1..π_n drawn so far from a DP with precision a and base ᾱ.
struct UrnState {
  std::vector<Assignment> drawn;
  double a = 1.0;
  DiscreteMeasure base;
};

/// Law of the next draw: a/(a+n) ᾱ + Σ_i 1/(a+n) δ_{π_i}.
DiscreteMeasure urn_predictive(const UrnState& state);

/// n sequential Pólya-urn draws: a fresh base draw with probability
/// a/(a+i), otherwise a uniformly chosen earlier value.
template <class Atom, class Draw>
std::vector<Atom> sample_urn(double a, std::size_t n, RngStream& rng, Draw&& draw_base) {
  std::vector<Atom> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double fresh = a / (a + static_cast<double>(i));
    if (i == 0 || rng.uniform() < fresh) {
      values.push_back(draw_base(rng));
    } else {
      values.push_back(values[rng.uniform_index(i)]);
    }
  }
  return values;
}

/// Class labels 0, 1, ... by order of first appearance of each distinct value.
template <class Atom>
std::vector<std::size_t> class_labels(const std::vector<Atom>& values) {
  std::map<Atom, std::size_t> seen;
  std::vector<std::size_t> labels;
  labels.reserve(values.size());
  for (const auto& v : values) labels.push_back(seen.emplace(v, seen.size()).first->second);
  return labels;
}

std::vector<std::size_t> sample_partition(double a, const DiscreteMeasure& base, std::size_t n, RngStream& rng);
std::vector<std::size_t> sample_partition(double a, const ContinuousBase& base, std::size_t n, RngStream& rng);

/// Σ_{i=1..n} a / (a + i - 1).
double expected_clusters(double a, std::size_t n);

/// f(observation | parameter).
using Likelihood = std::function<double(const Assignment& observation, const Assignment& parameter)>;

/// Explicit likelihood table; absent entries have probability zero.
class LikelihoodTable {
 public:
  void set(const Assignment& parameter, const Assignment& observation, double probability);
  double operator()(const Assignment& observation, const Assignment& parameter) const;

 private:
  std::map<std::pair<Assignment, Assignment>, double> table_;
};

/// Each coordinate of the observation equals the parameter's with
/// probability 1 - epsilon, otherwise is uniform over the other categories.
Likelihood symmetric_noise(const ProductSpace& space, double epsilon);

/// Resamples π_i from its full conditional: the urn predictive over π_{-i}
/// reweighted by f(X_i | π). Throws ZeroReweightedMass when every candidate
/// has zero weight.
Assignment gibbs_reassign(std::size_t i, std::span<const Assignment> parameters, std::span<const Assignment> data,
                          const Likelihood& likelihood, double a, const DiscreteMeasure& base, RngStream& rng);

struct MixtureFit {
  std::vector<Assignment> parameters;      // final π_i
  std::vector<std::size_t> labels;         // class of each observation
  std::vector<std::size_t> class_counts;   // per label
  std::vector<std::size_t> trace;          // number of classes after each sweep
};

/// Sweeps gibbs_reassign over observations in index order, starting with every
/// observation in one class at the base's modal point.
MixtureFit run_gibbs(std::span<const Assignment> data, const Likelihood& likelihood, double a,
                     const DiscreteMeasure& base, std::size_t sweeps, RngStream& rng);

}  // namespace hyperdp

#endif  // HYPERDP_MIXTURE_HPP
