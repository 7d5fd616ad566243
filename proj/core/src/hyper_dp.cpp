#include "hyperdp/hyper_dp.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hyperdp {

namespace {

constexpr double kMarkovTolerance = 1e-12;
// Clique marginals of the combination may drift from their bases by the
// consistency tolerance.
constexpr double kMarginalTolerance = 1e-8;

Assignment project(const Assignment& x, const std::vector<std::size_t>& pos) {
  Assignment out;
  out.reserve(pos.size());
  for (std::size_t p : pos) out.push_back(x[p]);
  return out;
}

std::string join(const VertexList& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out + "}";
}

std::string describe_failure(const RefinementReport& report) {
  for (const auto& v : report.verdicts) {
    if (v.passed) continue;
    std::string msg = "separator " + join(v.separator) + " does not determine " + join(v.target);
    if (!v.witnesses.empty()) {
      msg += " at";
      for (const auto& [var, cat] : v.witnesses.front().separator_value) msg += " " + var + "=" + cat;
    }
    return msg;
  }
  return "refinement condition holds";
}

std::set<std::string> as_set(const VertexList& v) { return {v.begin(), v.end()}; }

}  // namespace

RefinementReport check_refinement(const DiscreteMeasure& h, const VertexList& separator,
                                  const VertexList& target) {
  const ProductSpace& space = h.space();
  const auto target_set = as_set(target);
  for (const auto& c : separator) {
    space.index_of(c);
    if (!target_set.count(c)) {
      throw Error(ErrorCode::SpaceMismatch, "separator variable '" + c + "' is not in the target set");
    }
  }
  std::vector<std::string> rest;
  for (const auto& b : target) {
    space.index_of(b);
    if (std::find(separator.begin(), separator.end(), b) == separator.end()) rest.push_back(b);
  }

  SeparatorVerdict verdict;
  verdict.separator = separator;
  verdict.target = target;

  // c -> H(c, ·) over the remaining target variables.
  const auto c_pos = space.positions(separator);
  const auto r_pos = space.positions(rest);
  std::map<Assignment, std::map<Assignment, double>> groups;
  for (const auto& [x, mass] : h.points()) groups[project(x, c_pos)][project(x, r_pos)] += mass;

  const ProductSpace rest_space = space.subspace(rest);
  const ProductSpace sep_space = space.subspace(separator);
  for (const auto& [c, cond] : groups) {
    double total = 0.0, top = 0.0;
    for (const auto& [r, m] : cond) {
      total += m;
      top = std::max(top, m);
    }
    if (top / total >= 1.0 - kProbabilityTolerance) continue;
    verdict.passed = false;
    RefinementWitness w{sep_space.decode(c), DiscreteMeasure(rest_space)};
    for (const auto& [r, m] : cond) w.conditional.add(r, m / total);
    verdict.witnesses.push_back(std::move(w));
  }
  return RefinementReport{{std::move(verdict)}};
}

RefinementReport check_refinement(const ContinuousBase&, const VertexList& separator, const VertexList& target) {
  SeparatorVerdict verdict;
  verdict.separator = separator;
  verdict.target = target;
  return RefinementReport{{std::move(verdict)}};
}

RefinementReport refinement_report(const DiscreteMeasure& combined, const CliqueDecomposition& decomp,
                                   bool strict) {
  RefinementReport report;
  for (std::size_t k = 1; k < decomp.size(); ++k) {
    auto r = check_refinement(combined, decomp.separators[k], decomp.cliques[k]);
    r.verdicts.front().clique = k;
    report.verdicts.push_back(std::move(r.verdicts.front()));
    if (strict) {
      auto h = check_refinement(combined, decomp.separators[k], decomp.histories[k - 1]);
      h.verdicts.front().clique = k;
      report.verdicts.push_back(std::move(h.verdicts.front()));
    }
  }
  return report;
}

HyperDirichletProcess build_hdp(const Graph& graph, const std::vector<DiscreteMeasure>& clique_bases, double nu,
                                const BuildOptions& options) {
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "precision nu must be positive");
  HDPSpec spec;
  spec.graph = graph;
  spec.decomposition = perfect_ordering(graph);
  spec.nu = nu;
  const auto& decomp = spec.decomposition;

  if (clique_bases.size() != decomp.size()) {
    throw Error(ErrorCode::CountMismatch, "graph has " + std::to_string(decomp.size()) + " cliques but " +
                                              std::to_string(clique_bases.size()) + " bases were given");
  }
  std::vector<bool> used(clique_bases.size(), false);
  for (const auto& clique : decomp.cliques) {
    const auto want = as_set(clique);
    bool found = false;
    for (std::size_t j = 0; j < clique_bases.size() && !found; ++j) {
      if (used[j] || as_set(clique_bases[j].space().variables()) != want) continue;
      used[j] = true;
      found = true;
      if (!clique_bases[j].is_probability()) {
        throw Error(ErrorCode::InvalidArgument, "base on " + join(clique) + " is not a probability measure");
      }
      spec.clique_bases.push_back(reorder(clique_bases[j], clique));
    }
    if (!found) throw Error(ErrorCode::SpaceMismatch, "no base is defined on clique " + join(clique));
  }

  for (std::size_t i = 0; i < decomp.size(); ++i) {
    for (std::size_t j = i + 1; j < decomp.size(); ++j) {
      const auto r = is_consistent(spec.clique_bases[i], spec.clique_bases[j]);
      if (!r.consistent()) {
        throw Error(ErrorCode::Inconsistent, "bases on " + join(decomp.cliques[i]) + " and " +
                                                 join(decomp.cliques[j]) + " disagree on their overlap (gap " +
                                                 std::to_string(r.marginal_gap) + ")");
      }
    }
  }

  DiscreteMeasure combined = markov_combination_seq(decomp, spec.clique_bases);
  if (!is_markov(combined, decomp, kMarkovTolerance)) {
    throw Error(ErrorCode::NotMarkov, "combined base fails the clique factorization");
  }
  for (std::size_t i = 0; i < decomp.size(); ++i) {
    if (linf_distance(marginalize(combined, decomp.cliques[i]), spec.clique_bases[i]) > kMarginalTolerance) {
      throw Error(ErrorCode::NotMarkov, "combined base does not reproduce the base on " + join(decomp.cliques[i]));
    }
  }

  RefinementReport report = refinement_report(combined, decomp, options.strict);
  if (!report.passed()) {
    const std::string msg = describe_failure(report);
    throw RefinementViolatedError(std::move(report), msg);
  }
  DPParams params = make_dp_params(nu, std::move(combined));
  return HyperDirichletProcess{std::move(spec), std::move(params), std::move(report)};
}

DiscreteAtoms sample_hdp(const HyperDirichletProcess& model, const SamplerConfig& cfg, RngStream& rng) {
  return sample_dp(model.combined, cfg, rng);
}

bool verify_sample_markov(const DiscreteAtoms& theta, const ProductSpace& space, const CliqueDecomposition& decomp,
                          double tol) {
  return is_markov(to_measure(theta, space), decomp, tol);
}

bool verify_sample_refinement(const DiscreteAtoms& theta, const ProductSpace& space, const VertexList& separator,
                              const VertexList& target) {
  const auto c_pos = space.positions(separator);
  const auto b_pos = space.positions(target);
  std::map<Assignment, Assignment> image;  // the map g: C-value -> B-value
  std::map<Assignment, double> c_mass, b_mass;
  for (std::size_t i = 0; i < theta.atoms.size(); ++i) {
    Assignment c = project(theta.atoms[i], c_pos);
    Assignment b = project(theta.atoms[i], b_pos);
    auto [it, inserted] = image.emplace(c, b);
    if (!inserted && it->second != b) return false;
    c_mass[c] += theta.weights[i];
    b_mass[b] += theta.weights[i];
  }
  if (c_mass.size() != b_mass.size()) return false;
  for (const auto& [c, m] : c_mass) {
    if (b_mass.at(image.at(c)) != m) return false;
  }
  return true;
}

HyperDirichletProcess hdp_posterior(const HyperDirichletProcess& model, std::span<const Assignment> data,
                                    const BuildOptions& options) {
  if (data.empty()) return model;
  const ProductSpace& space = model.combined.base.space();
  for (const auto& x : data) {
    if (!space.contains(x)) throw Error(ErrorCode::OutsideDomain, "observation outside the combined space");
  }
  const auto& decomp = model.spec.decomposition;
  const double nu = model.spec.nu;
  const double nu_post = nu + static_cast<double>(data.size());

  HDPSpec spec = model.spec;
  spec.nu = nu_post;
  for (std::size_t i = 0; i < decomp.size(); ++i) {
    const DiscreteMeasure& old = model.spec.clique_bases[i];
    const auto pos = space.positions(old.space().variables());
    DiscreteMeasure unnormalized(old.space());
    for (const auto& [x, m] : old.points()) unnormalized.add(x, nu * m);
    for (const auto& x : data) unnormalized.add(project(x, pos), 1.0);
    DiscreteMeasure updated(old.space());
    for (const auto& [x, m] : unnormalized.points()) updated.add(x, m / nu_post);
    spec.clique_bases[i] = std::move(updated);
  }

  // The joint posterior base must still satisfy the refinement condition for
  // the clique-wise update to describe it.
  const DPParams joint = dp_posterior(model.combined, data);
  RefinementReport report = refinement_report(joint.base, decomp, options.strict);
  if (!report.passed()) {
    throw Error(ErrorCode::ObservationViolatesSupport,
                "observations contradict the base's refinement structure: " + describe_failure(report));
  }
  DiscreteMeasure combined = markov_combination_seq(decomp, spec.clique_bases);
  if (linf_distance(combined, joint.base) > kMarkovTolerance) {
    throw Error(ErrorCode::NotMarkov, "clique-wise posterior does not recombine to the joint posterior base");
  }
  return HyperDirichletProcess{std::move(spec), DPParams{nu_post, std::move(combined)}, std::move(report)};
}

}  // namespace hyperdp
