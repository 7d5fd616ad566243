#include "hyperdp/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>

#include "hyperdp/error.hpp"

namespace hyperdp::io {

namespace {

std::string label_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number() || j.is_boolean()) return j.dump();
  throw Error(ErrorCode::ParseError, "labels must be strings or numbers, got " + j.dump());
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

json vertex_lists(const std::vector<VertexList>& lists, std::size_t from) {
  json out = json::array();
  for (std::size_t i = from; i < lists.size(); ++i) out.push_back(lists[i]);
  return out;
}

}  // namespace

std::string format_decimal(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format value");
  return std::string(buf.data(), ptr);
}

double parse_decimal(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw Error(ErrorCode::ParseError, "expected a decimal string, got " + j.dump());
  const auto& s = j.get_ref<const std::string&>();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "not a decimal number: '" + s + "'");
  }
  return v;
}

Graph graph_from_json(const json& j) {
  VertexList vertices;
  for (const auto& v : require(j, "vertices")) vertices.push_back(label_of(v));
  std::vector<std::pair<std::string, std::string>> edges;
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ParseError, "edges must be pairs: " + e.dump());
      edges.emplace_back(label_of(e[0]), label_of(e[1]));
    }
  }
  return Graph::build(std::move(vertices), edges);
}

json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  return json{{"vertices", g.vertices()}, {"edges", edges}};
}

json decomposition_to_json(const CliqueDecomposition& d) {
  return json{{"cliques", vertex_lists(d.cliques, 0)},
              {"separators", vertex_lists(d.separators, 1)},
              {"histories", vertex_lists(d.histories, 0)},
              {"residuals", vertex_lists(d.residuals, 1)}};
}

DiscreteMeasure measure_from_json(const json& j) {
  std::vector<std::string> vars;
  for (const auto& v : require(j, "variables")) vars.push_back(label_of(v));
  const json& doms = require(j, "domains");
  std::vector<std::vector<std::string>> domains;
  for (const auto& v : vars) {
    if (!doms.contains(v)) throw Error(ErrorCode::ParseError, "no domain for variable '" + v + "'");
    std::vector<std::string> cats;
    for (const auto& c : doms.at(v)) cats.push_back(label_of(c));
    domains.push_back(std::move(cats));
  }
  DiscreteMeasure m(ProductSpace(std::move(vars), std::move(domains)));
  for (const auto& p : require(j, "points")) {
    m.add(assignment_from_json(require(p, "assignment"), m.space()), parse_decimal(require(p, "mass")));
  }
  return m;
}

json measure_to_json(const DiscreteMeasure& m) {
  const ProductSpace& s = m.space();
  json domains = json::object();
  for (std::size_t i = 0; i < s.dimension(); ++i) domains[s.variables()[i]] = s.domain(i);
  json points = json::array();
  for (const auto& [x, mass] : m.points()) {
    points.push_back(json{{"assignment", labeled_to_json(s.decode(x))}, {"mass", format_decimal(mass)}});
  }
  return json{{"variables", s.variables()}, {"domains", domains}, {"points", points}};
}

json labeled_to_json(const LabeledAssignment& a) {
  json out = json::object();
  for (const auto& [var, cat] : a) out[var] = cat;
  return out;
}

Assignment assignment_from_json(const json& j, const ProductSpace& space) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "assignment must be an object: " + j.dump());
  LabeledAssignment labels;
  for (const auto& [k, v] : j.items()) labels.emplace_back(k, label_of(v));
  return space.encode(labels);
}

json consistency_to_json(const ConsistencyReport& r) {
  return json{{"proportional", r.proportional},
              {"equal_mass", r.equal_mass},
              {"consistent", r.consistent()},
              {"marginal_gap", format_decimal(r.marginal_gap)},
              {"mass_gap", format_decimal(r.mass_gap)}};
}

json refinement_to_json(const RefinementReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    json witnesses = json::array();
    for (const auto& w : v.witnesses) {
      witnesses.push_back(json{{"separator_value", labeled_to_json(w.separator_value)},
                               {"conditional", measure_to_json(w.conditional)}});
    }
    verdicts.push_back(json{{"clique", v.clique + 1},
                            {"separator", v.separator},
                            {"target", v.target},
                            {"passed", v.passed},
                            {"witnesses", witnesses}});
  }
  return json{{"passed", r.passed()}, {"separators", verdicts}};
}

json dp_params_to_json(const DPParams& p) {
  return json{{"nu", p.nu}, {"base", measure_to_json(p.base)}};
}

HdpSpecFile hdp_spec_from_json(const json& j) {
  HdpSpecFile f;
  f.graph = graph_from_json(require(j, "graph"));
  f.nu = parse_decimal(require(j, "nu"));
  for (const auto& b : require(j, "clique_bases")) f.clique_bases.push_back(measure_from_json(b));
  return f;
}

json hdp_spec_to_json(const HDPSpec& spec) {
  json bases = json::array();
  for (const auto& b : spec.clique_bases) bases.push_back(measure_to_json(b));
  return json{{"graph", graph_to_json(spec.graph)}, {"nu", spec.nu}, {"clique_bases", bases}};
}

json atoms_to_json(const DiscreteAtoms& theta, const ProductSpace& space, std::uint64_t seed,
                   std::uint64_t replicate) {
  json atoms = json::array();
  json weights = json::array();
  for (std::size_t i = 0; i < theta.atoms.size(); ++i) {
    atoms.push_back(labeled_to_json(space.decode(theta.atoms[i])));
    weights.push_back(format_decimal(theta.weights[i]));
  }
  return json{{"atoms", atoms},
              {"weights", weights},
              {"residual", format_decimal(theta.truncation_residual)},
              {"capped", theta.capped},
              {"seed", seed},
              {"replicate", replicate}};
}

std::vector<Assignment> read_observations_csv(std::istream& in, const ProductSpace& space) {
  std::string line;
  while (std::getline(in, line) && blank(line)) {
  }
  if (blank(line)) throw Error(ErrorCode::ParseError, "CSV has no header row");
  const auto header = split_csv_line(line);
  if (header.size() != space.dimension()) {
    throw Error(ErrorCode::ParseError, "CSV header must name exactly the model's " +
                                           std::to_string(space.dimension()) + " variables");
  }
  for (const auto& h : header) space.index_of(h);
  std::vector<Assignment> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                             " cells, expected " + std::to_string(header.size()));
    }
    LabeledAssignment labels;
    for (std::size_t i = 0; i < cells.size(); ++i) labels.emplace_back(header[i], cells[i]);
    out.push_back(space.encode(labels));
  }
  return out;
}

std::vector<double> read_reals_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  bool first = true;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    const auto cells = split_csv_line(line);
    const std::string& cell = cells.front();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    const bool numeric = ec == std::errc() && ptr == cell.data() + cell.size();
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::ParseError, "CSV row " + std::to_string(row) + " is not a number: '" + cell + "'");
    }
    first = false;
    out.push_back(v);
  }
  return out;
}

Likelihood likelihood_from_json(const json& j, const ProductSpace& space) {
  const std::string type = require(j, "type").get<std::string>();
  if (type == "symmetric-noise") return symmetric_noise(space, parse_decimal(require(j, "epsilon")));
  if (type == "table") {
    auto table = std::make_shared<LikelihoodTable>();
    for (const auto& e : require(j, "entries")) {
      table->set(assignment_from_json(require(e, "parameter"), space),
                 assignment_from_json(require(e, "observation"), space), parse_decimal(require(e, "probability")));
    }
    return [table](const Assignment& obs, const Assignment& param) { return (*table)(obs, param); };
  }
  throw Error(ErrorCode::ParseError, "unknown likelihood type '" + type + "'");
}

}  // namespace hyperdp::io
