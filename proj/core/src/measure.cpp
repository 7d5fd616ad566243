#include "hyperdp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

#include "hyperdp/error.hpp"

namespace hyperdp {

namespace {

Assignment project(const Assignment& x, const std::vector<std::size_t>& pos) {
  Assignment out;
  out.reserve(pos.size());
  for (std::size_t p : pos) out.push_back(x[p]);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out + "}";
}

bool same_variable_set(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) return false;
  std::set<std::string> sa(a.begin(), a.end());
  for (const auto& v : b) {
    if (!sa.count(v)) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------- ProductSpace

ProductSpace::ProductSpace(std::vector<std::string> variables,
                           std::vector<std::vector<std::string>> domains)
    : variables_(std::move(variables)), domains_(std::move(domains)) {
  if (variables_.size() != domains_.size()) {
    throw Error(ErrorCode::InvalidArgument, "one domain per variable is required");
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (!seen.insert(variables_[i]).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate variable '" + variables_[i] + "'");
    }
    if (domains_[i].empty()) {
      throw Error(ErrorCode::InvalidArgument, "variable '" + variables_[i] + "' has an empty domain");
    }
    std::unordered_set<std::string> cats(domains_[i].begin(), domains_[i].end());
    if (cats.size() != domains_[i].size()) {
      throw Error(ErrorCode::InvalidArgument, "variable '" + variables_[i] + "' repeats a category");
    }
  }
}

std::optional<std::size_t> ProductSpace::find(std::string_view variable) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i] == variable) return i;
  }
  return std::nullopt;
}

std::size_t ProductSpace::index_of(std::string_view variable) const {
  if (auto i = find(variable)) return *i;
  throw Error(ErrorCode::UnknownVariable, "unknown variable '" + std::string(variable) + "'");
}

std::vector<std::size_t> ProductSpace::positions(const std::vector<std::string>& vars) const {
  std::vector<std::size_t> out;
  out.reserve(vars.size());
  for (const auto& v : vars) out.push_back(index_of(v));
  return out;
}

ProductSpace ProductSpace::subspace(const std::vector<std::string>& vars) const {
  std::vector<std::vector<std::string>> doms;
  for (std::size_t p : positions(vars)) doms.push_back(domains_[p]);
  return ProductSpace(vars, std::move(doms));
}

bool ProductSpace::contains(const Assignment& x) const {
  if (x.size() != dimension()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= domains_[i].size()) return false;
  }
  return true;
}

std::uint64_t ProductSpace::cardinality() const {
  std::uint64_t n = 1;
  for (const auto& d : domains_) {
    if (n > std::numeric_limits<std::uint64_t>::max() / d.size()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    n *= d.size();
  }
  return n;
}

Assignment ProductSpace::encode(const LabeledAssignment& labels) const {
  Assignment x(dimension(), 0);
  std::vector<bool> assigned(dimension(), false);
  for (const auto& [var, cat] : labels) {
    std::size_t i = index_of(var);
    const auto& dom = domains_[i];
    auto it = std::find(dom.begin(), dom.end(), cat);
    if (it == dom.end()) {
      throw Error(ErrorCode::OutsideDomain, "category '" + cat + "' is not in the domain of '" + var + "'");
    }
    x[i] = static_cast<Category>(it - dom.begin());
    assigned[i] = true;
  }
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (!assigned[i]) {
      throw Error(ErrorCode::InvalidArgument, "assignment leaves '" + variables_[i] + "' unset");
    }
  }
  return x;
}

LabeledAssignment ProductSpace::decode(const Assignment& x) const {
  LabeledAssignment out;
  for (std::size_t i = 0; i < dimension(); ++i) out.emplace_back(variables_[i], domains_[i].at(x.at(i)));
  return out;
}

// ------------------------------------------------------------- DiscreteMeasure

DiscreteMeasure DiscreteMeasure::delta(ProductSpace space, const Assignment& at, double mass) {
  DiscreteMeasure m(std::move(space));
  m.add(at, mass);
  return m;
}

DiscreteMeasure DiscreteMeasure::uniform(ProductSpace space, double total) {
  DiscreteMeasure m(std::move(space));
  const double each = total / static_cast<double>(m.space().cardinality());
  m.space().for_each_point([&](const Assignment& x) { m.add(x, each); });
  return m;
}

void DiscreteMeasure::add(const Assignment& x, double mass) {
  if (!space_.contains(x)) throw Error(ErrorCode::OutsideDomain, "assignment outside the measure's space");
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::InvalidArgument, "masses must be finite and nonnegative");
  }
  if (mass == 0.0) return;
  mass_[x] += mass;
}

void DiscreteMeasure::set(const Assignment& x, double mass) {
  if (!space_.contains(x)) throw Error(ErrorCode::OutsideDomain, "assignment outside the measure's space");
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::InvalidArgument, "masses must be finite and nonnegative");
  }
  if (mass == 0.0) {
    mass_.erase(x);
  } else {
    mass_[x] = mass;
  }
}

double DiscreteMeasure::at(const Assignment& x) const {
  auto it = mass_.find(x);
  return it == mass_.end() ? 0.0 : it->second;
}

double DiscreteMeasure::total() const {
  double s = 0.0;
  for (const auto& [x, m] : mass_) s += m;
  return s;
}

bool DiscreteMeasure::is_probability() const {
  return std::abs(total() - 1.0) <= kProbabilityTolerance;
}

// ------------------------------------------------------------------ operations

std::vector<std::string> shared_variables(const ProductSpace& a, const ProductSpace& b) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    auto j = b.find(a.variables()[i]);
    if (!j) continue;
    if (a.domain(i) != b.domain(*j)) {
      throw Error(ErrorCode::IncompatibleDomains,
                  "variable '" + a.variables()[i] + "' has different domains in the two measures");
    }
    out.push_back(a.variables()[i]);
  }
  return out;
}

DiscreteMeasure marginalize(const DiscreteMeasure& m, const std::vector<std::string>& vars) {
  const auto pos = m.space().positions(vars);
  DiscreteMeasure out(m.space().subspace(vars));
  for (const auto& [x, mass] : m.points()) out.add(project(x, pos), mass);
  return out;
}

DiscreteMeasure normalize(const DiscreteMeasure& m) {
  const double t = m.total();
  if (!(t > 0.0)) throw Error(ErrorCode::ZeroMass, "cannot normalize a measure with zero total mass");
  return scale(m, 1.0 / t);
}

DiscreteMeasure scale(const DiscreteMeasure& m, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidArgument, "scale factor must be finite and nonnegative");
  }
  DiscreteMeasure out(m.space());
  for (const auto& [x, mass] : m.points()) out.add(x, mass * factor);
  return out;
}

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (!(a.space() == b.space())) throw Error(ErrorCode::SpaceMismatch, "sum of measures on different spaces");
  DiscreteMeasure out = a;
  for (const auto& [x, mass] : b.points()) out.add(x, mass);
  return out;
}

DiscreteMeasure reorder(const DiscreteMeasure& m, const std::vector<std::string>& vars) {
  if (!same_variable_set(m.space().variables(), vars)) {
    throw Error(ErrorCode::SpaceMismatch, "reorder target " + join(vars) + " differs from " +
                                              join(m.space().variables()));
  }
  return marginalize(m, vars);
}

DiscreteMeasure condition(const DiscreteMeasure& m, const std::vector<std::string>& vars,
                          const Assignment& values) {
  const auto pos = m.space().positions(vars);
  if (values.size() != pos.size()) {
    throw Error(ErrorCode::InvalidArgument, "conditioning values do not match conditioning variables");
  }
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (values[i] >= m.space().domain(pos[i]).size()) {
      throw Error(ErrorCode::OutsideDomain, "conditioning value outside the domain of '" + vars[i] + "'");
    }
  }
  std::vector<std::string> rest;
  std::vector<std::size_t> rest_pos;
  for (std::size_t i = 0; i < m.space().dimension(); ++i) {
    if (std::find(pos.begin(), pos.end(), i) == pos.end()) {
      rest.push_back(m.space().variables()[i]);
      rest_pos.push_back(i);
    }
  }
  DiscreteMeasure out(m.space().subspace(rest));
  for (const auto& [x, mass] : m.points()) {
    if (project(x, pos) == values) out.add(project(x, rest_pos), mass);
  }
  if (!(out.total() > 0.0)) {
    throw Error(ErrorCode::ZeroConditional, "conditioning event has zero mass");
  }
  return normalize(out);
}

double linf_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (!same_variable_set(a.space().variables(), b.space().variables())) {
    throw Error(ErrorCode::SpaceMismatch, "measures live on different variable sets");
  }
  if (shared_variables(a.space(), b.space()).size() != a.space().dimension()) {
    throw Error(ErrorCode::SpaceMismatch, "measures live on different spaces");
  }
  const DiscreteMeasure aligned = reorder(b, a.space().variables());
  double worst = 0.0;
  for (const auto& [x, mass] : a.points()) worst = std::max(worst, std::abs(mass - aligned.at(x)));
  for (const auto& [x, mass] : aligned.points()) worst = std::max(worst, std::abs(mass - a.at(x)));
  return worst;
}

ConsistencyReport is_consistent(const DiscreteMeasure& mu, const DiscreteMeasure& lambda, double tol) {
  const auto shared = shared_variables(mu.space(), lambda.space());
  ConsistencyReport r;
  const double tm = mu.total();
  const double tl = lambda.total();
  if (!(tm > 0.0) || !(tl > 0.0)) throw Error(ErrorCode::ZeroMass, "consistency needs nonzero total masses");
  r.marginal_gap = linf_distance(normalize(marginalize(mu, shared)), normalize(marginalize(lambda, shared)));
  r.mass_gap = std::abs(tm - tl) / std::max(tm, tl);
  r.proportional = r.marginal_gap <= tol;
  r.equal_mass = r.mass_gap <= tol;
  return r;
}

DiscreteMeasure markov_combination(const DiscreteMeasure& mu, const DiscreteMeasure& lambda) {
  const auto shared = shared_variables(mu.space(), lambda.space());
  const ConsistencyReport report = is_consistent(mu, lambda);
  if (!report.proportional) {
    throw Error(ErrorCode::Inconsistent, "condition 1 fails: normalized overlap marginals differ by " +
                                             std::to_string(report.marginal_gap));
  }
  if (!report.equal_mass) {
    throw Error(ErrorCode::Inconsistent, "condition 2 fails: total masses differ (relative gap " +
                                             std::to_string(report.mass_gap) + ")");
  }

  std::vector<std::string> rest;
  for (const auto& v : lambda.space().variables()) {
    if (!mu.space().find(v)) rest.push_back(v);
  }
  std::vector<std::string> vars = mu.space().variables();
  std::vector<std::vector<std::string>> doms = mu.space().domains();
  for (const auto& v : rest) {
    vars.push_back(v);
    doms.push_back(lambda.space().domain(lambda.space().index_of(v)));
  }

  // λ grouped by separator value: c -> [(x_{B'}, λ(c, x_{B'}))].
  const auto lc_pos = lambda.space().positions(shared);
  const auto lr_pos = lambda.space().positions(rest);
  std::map<Assignment, std::vector<std::pair<Assignment, double>>> groups;
  std::map<Assignment, double> lambda_c;
  for (const auto& [x, mass] : lambda.points()) {
    Assignment c = project(x, lc_pos);
    groups[c].emplace_back(project(x, lr_pos), mass);
    lambda_c[c] += mass;
  }

  const auto mc_pos = mu.space().positions(shared);
  DiscreteMeasure out(ProductSpace(std::move(vars), std::move(doms)));
  Assignment full;
  for (const auto& [xa, mass] : mu.points()) {
    Assignment c = project(xa, mc_pos);
    auto g = groups.find(c);
    if (g == groups.end()) continue;  // λ-null separator value: contributes zero
    const double denom = lambda_c[c];
    for (const auto& [xr, lm] : g->second) {
      full = xa;
      full.insert(full.end(), xr.begin(), xr.end());
      out.add(full, mass * (lm / denom));
    }
  }
  return out;
}

DiscreteMeasure markov_combination_seq(const CliqueDecomposition& decomp,
                                       const std::vector<DiscreteMeasure>& bases) {
  if (bases.size() != decomp.size()) {
    throw Error(ErrorCode::CountMismatch, "expected " + std::to_string(decomp.size()) + " clique bases, got " +
                                              std::to_string(bases.size()));
  }
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (!same_variable_set(bases[k].space().variables(), decomp.cliques[k])) {
      throw Error(ErrorCode::SpaceMismatch, "base " + std::to_string(k + 1) + " is on " +
                                                join(bases[k].space().variables()) + " but clique is " +
                                                join(decomp.cliques[k]));
    }
  }
  DiscreteMeasure g = bases.front();
  for (std::size_t k = 1; k < bases.size(); ++k) {
    try {
      g = markov_combination(g, bases[k]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Inconsistent) throw;
      throw Error(ErrorCode::Inconsistent, "clique " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return reorder(g, decomp.vertices);
}

bool is_markov(const DiscreteMeasure& theta, const CliqueDecomposition& decomp, double tol) {
  if (!same_variable_set(theta.space().variables(), decomp.vertices)) {
    throw Error(ErrorCode::SpaceMismatch, "measure variables " + join(theta.space().variables()) +
                                              " differ from decomposition vertices " + join(decomp.vertices));
  }
  const ProductSpace& space = theta.space();
  const std::size_t k = decomp.size();
  std::vector<DiscreteMeasure> clique_m, sep_m;
  std::vector<std::vector<std::size_t>> clique_pos, sep_pos;
  for (std::size_t i = 0; i < k; ++i) {
    clique_m.push_back(marginalize(theta, decomp.cliques[i]));
    sep_m.push_back(marginalize(theta, decomp.separators[i]));
    clique_pos.push_back(space.positions(decomp.cliques[i]));
    sep_pos.push_back(space.positions(decomp.separators[i]));
  }

  // Enumerate the join of clique-marginal supports: outside it both sides of
  // the factorization vanish.
  std::vector<Assignment> partial;
  for (const auto& [xc, m] : clique_m[0].points()) {
    Assignment x(space.dimension(), 0);
    for (std::size_t j = 0; j < xc.size(); ++j) x[clique_pos[0][j]] = xc[j];
    partial.push_back(std::move(x));
  }
  for (std::size_t i = 1; i < k; ++i) {
    // Positions of the separator inside the clique marginal's own layout.
    std::vector<std::size_t> sep_in_clique;
    for (const auto& v : decomp.separators[i]) {
      sep_in_clique.push_back(clique_m[i].space().index_of(v));
    }
    std::map<Assignment, std::vector<const Assignment*>> by_sep;
    for (const auto& [xc, m] : clique_m[i].points()) by_sep[project(xc, sep_in_clique)].push_back(&xc);
    std::vector<Assignment> next;
    for (const auto& x : partial) {
      auto it = by_sep.find(project(x, sep_pos[i]));
      if (it == by_sep.end()) continue;
      for (const Assignment* xc : it->second) {
        Assignment y = x;
        for (std::size_t j = 0; j < xc->size(); ++j) y[clique_pos[i][j]] = (*xc)[j];
        next.push_back(std::move(y));
      }
    }
    partial = std::move(next);
  }

  std::size_t covered = 0;
  for (const auto& x : partial) {
    double lhs = theta.at(x);
    if (lhs > 0.0) ++covered;
    double rhs = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      rhs *= clique_m[i].at(project(x, clique_pos[i]));
      if (i > 0) lhs *= sep_m[i].at(project(x, sep_pos[i]));
    }
    if (std::abs(lhs - rhs) > tol) return false;
  }
  // Every support point of theta lies in the join; this guards against a
  // malformed decomposition that does not cover the space.
  return covered == theta.support_size();
}

}  // namespace hyperdp
