#include "hyperdp/graph.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "hyperdp/error.hpp"

namespace hyperdp {

namespace {

struct SearchResult {
  std::vector<std::size_t> order;                  // visit order
  std::vector<std::size_t> weight;                 // earlier-neighbour count at visit time
  std::vector<std::vector<std::size_t>> earlier;   // earlier neighbours, per vertex index
  std::vector<std::size_t> position;               // inverse of order
};

// Maximum cardinality search. Ties go to the lowest declaration index.
SearchResult maximum_cardinality_search(const Graph& g) {
  const std::size_t n = g.size();
  SearchResult r;
  r.weight.assign(n, 0);
  r.earlier.assign(n, {});
  r.position.assign(n, n);
  std::vector<std::size_t> card(n, 0);
  std::vector<bool> numbered(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!numbered[v] && (best == n || card[v] > card[best])) best = v;
    }
    numbered[best] = true;
    r.position[best] = step;
    r.order.push_back(best);
    r.weight[best] = card[best];
    for (std::size_t u : g.neighbors(best)) {
      if (numbered[u] && u != best) {
        r.earlier[best].push_back(u);
      } else if (!numbered[u]) {
        ++card[u];
      }
    }
  }
  return r;
}

bool is_perfect_elimination(const Graph& g, const SearchResult& r) {
  for (std::size_t v : r.order) {
    const auto& prior = r.earlier[v];
    if (prior.size() < 2) continue;
    std::size_t follower = *std::max_element(prior.begin(), prior.end(), [&](auto a, auto b) {
      return r.position[a] < r.position[b];
    });
    for (std::size_t u : prior) {
      if (u != follower && !g.adjacent(u, follower)) return false;
    }
  }
  return true;
}

std::vector<std::size_t> sorted_indices(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool is_subset(const std::vector<std::size_t>& small, const std::vector<std::size_t>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

Graph Graph::build(VertexList vertices,
                   const std::vector<std::pair<std::string, std::string>>& edges) {
  Graph g;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!index.emplace(vertices[i], i).second) {
      throw Error(ErrorCode::DuplicateVertex, "duplicate vertex label '" + vertices[i] + "'");
    }
  }
  const std::size_t n = vertices.size();
  g.labels_ = std::move(vertices);
  g.adjacency_.assign(n, {});
  g.matrix_.assign(n * n, false);
  for (const auto& [a, b] : edges) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end()) throw Error(ErrorCode::UnknownVertex, "edge references unknown vertex '" + a + "'");
    if (ib == index.end()) throw Error(ErrorCode::UnknownVertex, "edge references unknown vertex '" + b + "'");
    std::size_t u = ia->second, v = ib->second;
    if (u == v || g.matrix_[u * n + v]) continue;
    g.matrix_[u * n + v] = g.matrix_[v * n + u] = true;
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
    ++g.edge_count_;
  }
  for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());
  return g;
}

std::optional<std::size_t> Graph::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

std::size_t Graph::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw Error(ErrorCode::UnknownVertex, "unknown vertex '" + std::string(label) + "'");
}

std::vector<std::pair<std::string, std::string>> Graph::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t u = 0; u < size(); ++u) {
    for (std::size_t v : adjacency_[u]) {
      if (u < v) out.emplace_back(labels_[u], labels_[v]);
    }
  }
  return out;
}

bool Graph::connected() const {
  if (size() <= 1) return true;
  std::vector<bool> seen(size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t u : adjacency_[v]) {
      if (!seen[u]) {
        seen[u] = true;
        ++reached;
        queue.push_back(u);
      }
    }
  }
  return reached == size();
}

VertexList Graph::sorted(const VertexList& labels) const {
  std::vector<std::size_t> idx;
  idx.reserve(labels.size());
  for (const auto& l : labels) idx.push_back(index_of(l));
  idx = sorted_indices(std::move(idx));
  VertexList out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels_[i]);
  return out;
}

bool is_decomposable(const Graph& g) {
  return is_perfect_elimination(g, maximum_cardinality_search(g));
}

CliqueDecomposition perfect_ordering(const Graph& g) {
  if (g.size() == 0) throw Error(ErrorCode::InvalidArgument, "graph has no vertices");
  SearchResult r = maximum_cardinality_search(g);
  if (!is_perfect_elimination(g, r)) {
    throw Error(ErrorCode::NotDecomposable, "graph has a chordless cycle of length >= 4");
  }
  if (!g.connected()) throw Error(ErrorCode::NotConnected, "graph is not connected");

  // Blair & Peyton: a new clique starts whenever the search weight fails to grow.
  std::vector<std::vector<std::size_t>> cliques;
  std::vector<std::size_t> current{r.order.front()};
  for (std::size_t i = 1; i < r.order.size(); ++i) {
    std::size_t v = r.order[i];
    if (r.weight[v] <= r.weight[r.order[i - 1]]) {
      cliques.push_back(sorted_indices(current));
      current = r.earlier[v];
    }
    current.push_back(v);
  }
  cliques.push_back(sorted_indices(current));

  std::vector<VertexList> labelled;
  for (const auto& c : cliques) {
    VertexList l;
    for (std::size_t v : c) l.push_back(g.vertices()[v]);
    labelled.push_back(std::move(l));
  }
  return make_decomposition(g.vertices(), labelled);
}

CliqueDecomposition make_decomposition(const VertexList& vertices,
                                       const std::vector<VertexList>& cliques) {
  if (cliques.empty()) throw Error(ErrorCode::InvalidArgument, "decomposition needs at least one clique");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!index.emplace(vertices[i], i).second) {
      throw Error(ErrorCode::DuplicateVertex, "duplicate vertex label '" + vertices[i] + "'");
    }
  }
  auto to_indices = [&](const VertexList& labels) {
    std::vector<std::size_t> out;
    for (const auto& l : labels) {
      auto it = index.find(l);
      if (it == index.end()) throw Error(ErrorCode::UnknownVertex, "unknown vertex '" + l + "'");
      out.push_back(it->second);
    }
    return sorted_indices(std::move(out));
  };
  auto to_labels = [&](const std::vector<std::size_t>& idx) {
    VertexList out;
    for (std::size_t i : idx) out.push_back(vertices[i]);
    return out;
  };

  CliqueDecomposition d;
  d.vertices = vertices;
  std::vector<std::vector<std::size_t>> cl;
  for (const auto& c : cliques) {
    cl.push_back(to_indices(c));
    if (cl.back().empty()) throw Error(ErrorCode::InvalidArgument, "empty clique");
  }

  std::vector<std::size_t> history;
  for (std::size_t k = 0; k < cl.size(); ++k) {
    std::vector<std::size_t> sep, res;
    std::set_intersection(cl[k].begin(), cl[k].end(), history.begin(), history.end(),
                          std::back_inserter(sep));
    std::set_difference(cl[k].begin(), cl[k].end(), history.begin(), history.end(),
                        std::back_inserter(res));
    std::size_t parent = 0;
    if (k > 0) {
      bool found = false;
      for (std::size_t j = 0; j < k && !found; ++j) {
        if (is_subset(sep, cl[j])) {
          parent = j;
          found = true;
        }
      }
      if (!found) {
        throw Error(ErrorCode::InvalidArgument,
                    "clique " + std::to_string(k + 1) + " has a separator not contained in an earlier clique");
      }
    }
    std::vector<std::size_t> merged;
    std::set_union(history.begin(), history.end(), cl[k].begin(), cl[k].end(),
                   std::back_inserter(merged));
    history = std::move(merged);

    d.cliques.push_back(to_labels(cl[k]));
    d.separators.push_back(k == 0 ? VertexList{} : to_labels(sep));
    d.residuals.push_back(k == 0 ? VertexList{} : to_labels(res));
    d.histories.push_back(to_labels(history));
    d.parents.push_back(parent);
  }
  if (history.size() != vertices.size()) {
    throw Error(ErrorCode::InvalidArgument, "cliques do not cover every vertex");
  }
  return d;
}

CliqueDecomposition two_clique_decomposition(const VertexList& a, const VertexList& b) {
  VertexList vertices = a;
  for (const auto& v : b) {
    if (std::find(vertices.begin(), vertices.end(), v) == vertices.end()) vertices.push_back(v);
  }
  return make_decomposition(vertices, {a, b});
}

bool separates(const Graph& g, const VertexList& a, const VertexList& b, const VertexList& c) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "separation query needs nonempty A and B");
  std::vector<bool> blocked(g.size(), false);
  for (const auto& v : c) blocked[g.index_of(v)] = true;
  std::vector<bool> target(g.size(), false);
  for (const auto& v : b) {
    std::size_t i = g.index_of(v);
    if (blocked[i]) throw Error(ErrorCode::InvalidArgument, "B must be disjoint from C");
    target[i] = true;
  }
  std::vector<bool> seen(g.size(), false);
  std::deque<std::size_t> queue;
  for (const auto& v : a) {
    std::size_t i = g.index_of(v);
    if (blocked[i]) throw Error(ErrorCode::InvalidArgument, "A must be disjoint from C");
    if (!seen[i]) {
      seen[i] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    if (target[v]) return false;
    for (std::size_t u : g.neighbors(v)) {
      if (!seen[u] && !blocked[u]) {
        seen[u] = true;
        queue.push_back(u);
      }
    }
  }
  return true;
}

}  // namespace hyperdp
