#ifndef HYPERDP_HYPER_DP_HPP
#define HYPERDP_HYPER_DP_HPP

#include <span>
#include <string>
#include <vector>

#include "hyperdp/dirichlet_process.hpp"
#include "hyperdp/error.hpp"
#include "hyperdp/graph.hpp"
#include "hyperdp/measure.hpp"

namespace hyperdp {

/// A separator value whose conditional over the clique is not a point mass.
struct RefinementWitness {
  LabeledAssignment separator_value;
  /// H_{B|C}(· | c) over the clique's non-separator variables.
  DiscreteMeasure conditional;
};

/// Refinement check of one (separator, target) pair: every separator value c
/// with H_C(c) > 0 must determine the target variables.
struct SeparatorVerdict {
  std::size_t clique = 0;  // position in the perfect order (0-based)
  VertexList separator;
  VertexList target;
  bool passed = true;
  std::vector<RefinementWitness> witnesses;
};

struct RefinementReport {
  std::vector<SeparatorVerdict> verdicts;

  bool passed() const noexcept {
    for (const auto& v : verdicts) {
      if (!v.passed) return false;
    }
    return true;
  }
};

/// Raised by build_hdp when a separator fails the refinement check.
class RefinementViolatedError : public Error {
 public:
  RefinementViolatedError(RefinementReport report, const std::string& message)
      : Error(ErrorCode::RefinementViolated, message), report_(std::move(report)) {}

  const RefinementReport& report() const noexcept { return report_; }

 private:
  RefinementReport report_;
};

/// Degenerate-conditional check on a discrete base H: for each c with
/// H_C(c) > 0 the conditional H_{B|C}(·|c) must put mass 1 (within 1e-12) on a
/// single point. Requires C ⊆ B ⊆ H's variables.
RefinementReport check_refinement(const DiscreteMeasure& h, const VertexList& separator,
                                  const VertexList& target);

/// Atomless bases draw distinct atoms almost surely, so the check passes.
RefinementReport check_refinement(const ContinuousBase& h, const VertexList& separator,
                                  const VertexList& target);

/// Graph, perfect clique ordering, one probability base per clique (on that
/// clique's variables, in the decomposition's vertex order) and precision ν.
struct HDPSpec {
  Graph graph;
  CliqueDecomposition decomposition;
  std::vector<DiscreteMeasure> clique_bases;
  double nu = 1.0;
};

/// A validated hyper Dirichlet process: its model description, the plain DP over the
/// combined Markov base, and the refinement report that licensed it.
struct HyperDirichletProcess {
  HDPSpec spec;
  DPParams combined;
  RefinementReport refinement;
};

struct BuildOptions {
  /// Also require each history H_{k-1} to refine its separator S_k.
  bool strict = false;
};

/// Combines the clique bases and validates the result.
///
/// Bases may be supplied in any order; each is matched to the clique with the
/// same variable set. Throws NotDecomposable, NotConnected, CountMismatch,
/// SpaceMismatch, Inconsistent, RefinementViolated (RefinementViolatedError)
/// or NotMarkov.
HyperDirichletProcess build_hdp(const Graph& graph, const std::vector<DiscreteMeasure>& clique_bases,
                                double nu, const BuildOptions& options = {});

/// Refinement verdicts for every separator of a combined base, without
/// throwing.
RefinementReport refinement_report(const DiscreteMeasure& combined, const CliqueDecomposition& decomp,
                                   bool strict = false);

DiscreteAtoms sample_hdp(const HyperDirichletProcess& model, const SamplerConfig& cfg, RngStream& rng);

/// Aggregates the atoms on `space` and runs the exact factorization check.
bool verify_sample_markov(const DiscreteAtoms& theta, const ProductSpace& space,
                          const CliqueDecomposition& decomp, double tol);

/// Atoms that agree on the separator agree on the target, and the masses of
/// separator classes equal the masses of target classes.
bool verify_sample_refinement(const DiscreteAtoms& theta, const ProductSpace& space,
                              const VertexList& separator, const VertexList& target);

/// Conjugate update of every clique base:
///   H'_i = (ν H_i + Σ_j δ_{X_ji}) / (ν + n),  ν' = ν + n.
/// Throws OutsideDomain, or ObservationViolatesSupport when the data break the
/// refinement property (impossible for data drawn from the process).
HyperDirichletProcess hdp_posterior(const HyperDirichletProcess& model, std::span<const Assignment> data,
                                    const BuildOptions& options = {});

}  // namespace hyperdp

#endif  // HYPERDP_HYPER_DP_HPP
