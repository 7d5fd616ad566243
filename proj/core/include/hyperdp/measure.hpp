#ifndef HYPERDP_MEASURE_HPP
#define HYPERDP_MEASURE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperdp/graph.hpp"

namespace hyperdp {

/// Index of a category within a variable's domain.
using Category = std::uint32_t;
/// One category index per variable, in the owning space's variable order.
using Assignment = std::vector<Category>;
/// Variable label -> category label pairs, as read from or written to files.
using LabeledAssignment = std::vector<std::pair<std::string, std::string>>;

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kDefaultConsistencyTolerance = 1e-9;

/// Product of finite categorical domains, one per variable.
class ProductSpace {
 public:
  ProductSpace() = default;
  /// Throws InvalidArgument on duplicate labels or empty domains.
  ProductSpace(std::vector<std::string> variables, std::vector<std::vector<std::string>> domains);

  const std::vector<std::string>& variables() const noexcept { return variables_; }
  const std::vector<std::string>& domain(std::size_t i) const { return domains_[i]; }
  const std::vector<std::vector<std::string>>& domains() const noexcept { return domains_; }
  std::size_t dimension() const noexcept { return variables_.size(); }

  std::optional<std::size_t> find(std::string_view variable) const;
  /// Throws UnknownVariable.
  std::size_t index_of(std::string_view variable) const;
  /// Positions of `vars` in this space, in the order given. Throws UnknownVariable.
  std::vector<std::size_t> positions(const std::vector<std::string>& vars) const;

  /// Subspace over `vars`, in the order given.
  ProductSpace subspace(const std::vector<std::string>& vars) const;

  bool contains(const Assignment& x) const;
  /// Number of points; saturates at UINT64_MAX.
  std::uint64_t cardinality() const;

  /// Throws UnknownVariable / OutsideDomain; every variable must be assigned.
  Assignment encode(const LabeledAssignment& labels) const;
  LabeledAssignment decode(const Assignment& x) const;

  /// Visits every point in lexicographic index order.
  template <class F>
  void for_each_point(F&& f) const {
    Assignment x(dimension(), 0);
    while (true) {
      f(static_cast<const Assignment&>(x));
      std::size_t i = dimension();
      while (i > 0) {
        --i;
        if (++x[i] < domains_[i].size()) break;
        x[i] = 0;
        if (i == 0) return;
      }
      if (dimension() == 0) return;
    }
  }

  friend bool operator==(const ProductSpace&, const ProductSpace&) = default;

 private:
  std::vector<std::string> variables_;
  std::vector<std::vector<std::string>> domains_;
};

/// Finite nonnegative measure on a ProductSpace with sparse storage: points of
/// zero mass are never stored.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(ProductSpace space) : space_(std::move(space)) {}

  static DiscreteMeasure delta(ProductSpace space, const Assignment& at, double mass = 1.0);
  static DiscreteMeasure uniform(ProductSpace space, double total = 1.0);

  const ProductSpace& space() const noexcept { return space_; }
  const std::map<Assignment, double>& points() const noexcept { return mass_; }

  /// Adds mass at `x`. Throws OutsideDomain, or InvalidArgument for negative or
  /// non-finite mass.
  void add(const Assignment& x, double mass);
  /// Replaces the mass at `x`.
  void set(const Assignment& x, double mass);

  double at(const Assignment& x) const;
  double total() const;
  std::size_t support_size() const noexcept { return mass_.size(); }
  bool is_probability() const;

 private:
  ProductSpace space_;
  std::map<Assignment, double> mass_;
};

/// Names the variables two spaces share, in `a`'s order. Throws
/// IncompatibleDomains when a shared variable has different categories.
std::vector<std::string> shared_variables(const ProductSpace& a, const ProductSpace& b);

/// Marginal over `vars`, laid out in the order given.
DiscreteMeasure marginalize(const DiscreteMeasure& m, const std::vector<std::string>& vars);
/// Throws ZeroMass.
DiscreteMeasure normalize(const DiscreteMeasure& m);
DiscreteMeasure scale(const DiscreteMeasure& m, double factor);
/// Pointwise sum; both operands must live on the same space (same variable order).
DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b);
/// Same measure with variables permuted into `vars` order.
DiscreteMeasure reorder(const DiscreteMeasure& m, const std::vector<std::string>& vars);

/// Conditional probability measure on the remaining variables given
/// `vars = values`. Throws ZeroConditional when the conditioning event is null.
DiscreteMeasure condition(const DiscreteMeasure& m, const std::vector<std::string>& vars,
                          const Assignment& values);

/// Sup-norm distance after aligning variables by label. Throws SpaceMismatch
/// when the variable sets or domains differ.
double linf_distance(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// The two halves of consistency between finite measures: normalized overlap
/// marginals agree, and the total masses agree.
struct ConsistencyReport {
  bool proportional = false;
  bool equal_mass = false;
  double marginal_gap = 0.0;  // L∞ between normalized overlap marginals
  double mass_gap = 0.0;      // relative total-mass difference

  bool consistent() const noexcept { return proportional && equal_mass; }
};

ConsistencyReport is_consistent(const DiscreteMeasure& mu, const DiscreteMeasure& lambda,
                                double tol = kDefaultConsistencyTolerance);

/// Markov combination of two consistent finite measures. The result lives on
/// mu's variables followed by lambda's remaining ones and carries mu's total
/// mass. Throws Inconsistent naming the failing condition.
DiscreteMeasure markov_combination(const DiscreteMeasure& mu, const DiscreteMeasure& lambda);

/// Iterated combination of one base per clique, in perfect order. The result
/// is laid out in the decomposition's vertex order.
DiscreteMeasure markov_combination_seq(const CliqueDecomposition& decomp,
                                       const std::vector<DiscreteMeasure>& bases);

/// Junction-tree factorization check:
///   θ(x) · Π_{k>=2} θ_{S_k}(x_{S_k}) == Π_k θ_{C_k}(x_{C_k})   for every x.
/// Throws SpaceMismatch when theta's variables differ from the decomposition's.
bool is_markov(const DiscreteMeasure& theta, const CliqueDecomposition& decomp, double tol);

}  // namespace hyperdp

#endif  // HYPERDP_MEASURE_HPP
