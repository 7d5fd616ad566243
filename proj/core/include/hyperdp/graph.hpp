#ifndef HYPERDP_GRAPH_HPP
#define HYPERDP_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hyperdp {

/// Vertex labels, kept in the owning graph's declaration order.
using VertexList = std::vector<std::string>;

/// Undirected simple graph over labelled vertices.
///
/// Self-loops are implicit (every vertex is adjacent to itself by convention)
/// and never stored; parallel edges collapse to one.
class Graph {
 public:
  Graph() = default;

  /// Throws DuplicateVertex or UnknownVertex.
  static Graph build(VertexList vertices,
                     const std::vector<std::pair<std::string, std::string>>& edges);

  const VertexList& vertices() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

  std::optional<std::size_t> find(std::string_view label) const;
  /// Throws UnknownVertex.
  std::size_t index_of(std::string_view label) const;

  bool adjacent(std::size_t u, std::size_t v) const { return matrix_[u * size() + v]; }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_[v]; }

  /// Edges as (u, v) label pairs with u declared before v, lexicographic by index.
  std::vector<std::pair<std::string, std::string>> edges() const;
  std::size_t edge_count() const noexcept { return edge_count_; }

  bool connected() const;

  /// Sorts labels into declaration order; throws UnknownVertex.
  VertexList sorted(const VertexList& labels) const;

 private:
  VertexList labels_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<bool> matrix_;
  std::size_t edge_count_ = 0;
};

/// Cliques C_1..C_n in a perfect order together with their separators
/// S_k = C_k ∩ H_{k-1}, histories H_k = C_1 ∪ ... ∪ C_k and residuals
/// R_k = C_k \ H_{k-1}.
///
/// All vectors are indexed by clique position. `separators[0]` and
/// `residuals[0]` are empty placeholders, `parents[0]` is unused; for k >= 1,
/// `parents[k]` is an earlier clique containing `separators[k]`.
struct CliqueDecomposition {
  VertexList vertices;
  std::vector<VertexList> cliques;
  std::vector<VertexList> separators;
  std::vector<VertexList> histories;
  std::vector<VertexList> residuals;
  std::vector<std::size_t> parents;

  std::size_t size() const noexcept { return cliques.size(); }
};

/// Chordality via maximum cardinality search and a perfect-elimination check.
bool is_decomposable(const Graph& g);

/// Perfect clique ordering from maximum cardinality search, ties broken by
/// lowest declaration index. Throws NotDecomposable or NotConnected.
CliqueDecomposition perfect_ordering(const Graph& g);

/// Builds separators/histories/residuals for an explicit clique sequence over
/// `vertices` (declaration order). Throws InvalidArgument when the sequence is
/// not a perfect ordering or does not cover `vertices`.
CliqueDecomposition make_decomposition(const VertexList& vertices,
                                       const std::vector<VertexList>& cliques);

/// Decomposition of the graph made of two complete components A and B.
CliqueDecomposition two_clique_decomposition(const VertexList& a, const VertexList& b);

/// True iff every path from a vertex of `a` to a vertex of `b` meets `c`.
/// Requires a and b nonempty and disjoint from c; throws UnknownVertex.
bool separates(const Graph& g, const VertexList& a, const VertexList& b, const VertexList& c);

}  // namespace hyperdp

#endif  // HYPERDP_GRAPH_HPP
