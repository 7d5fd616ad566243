#ifndef HYPERDP_IO_HPP
#define HYPERDP_IO_HPP

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperdp/dirichlet_process.hpp"
#include "hyperdp/graph.hpp"
#include "hyperdp/hyper_dp.hpp"
#include "hyperdp/measure.hpp"
#include "hyperdp/mixture.hpp"

namespace hyperdp::io {

using nlohmann::json;

/// Shortest decimal string that parses back to exactly `value`.
std::string format_decimal(double value);
/// Accepts a decimal string or a JSON number. Throws ParseError.
double parse_decimal(const json& j);

// Graph: {"vertices": [...], "edges": [[u, v], ...]}
Graph graph_from_json(const json& j);
json graph_to_json(const Graph& g);

// {"cliques": [...], "separators": [...], "histories": [...], "residuals": [...]}
// separators and residuals start at the second clique.
json decomposition_to_json(const CliqueDecomposition& d);

// {"variables": [...], "domains": {var: [cats]}, "points": [{"assignment": {var: cat}, "mass": "r"}]}
DiscreteMeasure measure_from_json(const json& j);
json measure_to_json(const DiscreteMeasure& m);

json labeled_to_json(const LabeledAssignment& a);
/// Observation object {var: cat} -> assignment on `space`.
Assignment assignment_from_json(const json& j, const ProductSpace& space);

json consistency_to_json(const ConsistencyReport& r);
json refinement_to_json(const RefinementReport& r);

// {"nu": r, "base": measure}
json dp_params_to_json(const DPParams& p);

/// Parsed (not yet validated) HDP spec file.
struct HdpSpecFile {
  Graph graph;
  double nu = 1.0;
  std::vector<DiscreteMeasure> clique_bases;
};

// {"graph": graph, "nu": r, "clique_bases": [measure, ...]}
HdpSpecFile hdp_spec_from_json(const json& j);
json hdp_spec_to_json(const HDPSpec& spec);

/// One JSONL record for a sampled measure.
json atoms_to_json(const DiscreteAtoms& theta, const ProductSpace& space, std::uint64_t seed,
                   std::uint64_t replicate);

/// CSV with a header naming variables of `space` (any order, extra columns
/// rejected); one observation per row. Throws ParseError / OutsideDomain.
std::vector<Assignment> read_observations_csv(std::istream& in, const ProductSpace& space);
/// Single-column CSV of reals; a non-numeric first row is taken as a header.
std::vector<double> read_reals_csv(std::istream& in);

/// {"type": "symmetric-noise", "epsilon": r} or
/// {"type": "table", "entries": [{"parameter": {...}, "observation": {...}, "probability": r}]}
Likelihood likelihood_from_json(const json& j, const ProductSpace& space);

}  // namespace hyperdp::io

#endif  // HYPERDP_IO_HPP
