#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "hyperdp/dirichlet_process.hpp"
#include "hyperdp/error.hpp"
#include "hyperdp/graph.hpp"
#include "hyperdp/hyper_dp.hpp"
#include "hyperdp/io.hpp"
#include "hyperdp/measure.hpp"
#include "hyperdp/mixture.hpp"
#include "hyperdp/reconcile.hpp"

namespace hyperdp::cli {

namespace {

using io::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error carrying a structured payload for the JSON error object.
class ReportedError : public Error {
 public:
  ReportedError(ErrorCode code, const std::string& message, json extra)
      : Error(code, message), extra_(std::move(extra)) {}
  const json& extra() const noexcept { return extra_; }

 private:
  json extra_;
};

/// Everything a command produces; written out only after it succeeds.
struct Output {
  std::ostringstream stdout_text;
  std::vector<std::pair<std::string, std::string>> files;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "'" + path + "' is not valid JSON: " + e.what());
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(io::parse_decimal(json(item)));
  if (out.size() != expected) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " expects " + std::to_string(expected) +
                                                " comma-separated numbers");
  }
  return out;
}

/// Runs `f(r)` for r in [0, n) over `workers` threads; results keep index order.
template <class F>
std::vector<std::string> run_replicates(std::size_t n, std::size_t workers, F&& f) {
  std::vector<std::string> lines(n);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t r = 0; r < n; ++r) lines[r] = f(r);
    return lines;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < n; r = next++) {
          try {
            lines[r] = f(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return lines;
}

SamplerConfig sampler_config(std::uint64_t seed, double eps, std::size_t max_atoms) {
  SamplerConfig cfg{seed, eps, max_atoms};
  cfg.validate();
  return cfg;
}

DPParams load_dp(const std::string& base_path, double nu) {
  return make_dp_params(nu, io::measure_from_json(load_json(base_path)));
}

HyperDirichletProcess load_hdp(const std::string& spec_path, bool strict) {
  const auto file = io::hdp_spec_from_json(load_json(spec_path));
  return build_hdp(file.graph, file.clique_bases, file.nu, BuildOptions{strict});
}

json first_witness(const RefinementReport& report) {
  for (const auto& v : report.verdicts) {
    if (!v.passed && !v.witnesses.empty()) return io::labeled_to_json(v.witnesses.front().separator_value);
  }
  return json::object();
}

// ------------------------------------------------------------------ commands

void check_graph(const std::string& path, Output& o) {
  const Graph g = io::graph_from_json(load_json(path));
  json r = {{"decomposable", is_decomposable(g)}, {"connected", g.connected()}};
  if (r["decomposable"] && r["connected"]) {
    const json d = io::decomposition_to_json(perfect_ordering(g));
    for (const char* key : {"cliques", "separators", "histories", "residuals"}) r[key] = d.at(key);
  }
  o.stdout_text << r.dump() << '\n';
}

void combine(const std::vector<std::string>& paths, const std::string& graph_path, Output& o) {
  std::vector<DiscreteMeasure> bases;
  for (const auto& p : paths) bases.push_back(io::measure_from_json(load_json(p)));
  DiscreteMeasure result;
  if (graph_path.empty()) {
    if (bases.size() != 2) {
      throw Error(ErrorCode::InvalidArgument, "combine takes two measures, or --graph with one base per clique");
    }
    result = markov_combination(bases[0], bases[1]);
  } else {
    const CliqueDecomposition d = perfect_ordering(io::graph_from_json(load_json(graph_path)));
    if (bases.size() != d.size()) {
      throw Error(ErrorCode::CountMismatch, "graph has " + std::to_string(d.size()) + " cliques but " +
                                                std::to_string(bases.size()) + " bases were given");
    }
    std::vector<DiscreteMeasure> ordered;
    std::vector<bool> used(bases.size(), false);
    for (const auto& clique : d.cliques) {
      std::vector<std::string> want = clique;
      std::sort(want.begin(), want.end());
      bool found = false;
      for (std::size_t j = 0; j < bases.size() && !found; ++j) {
        auto have = bases[j].space().variables();
        std::sort(have.begin(), have.end());
        if (used[j] || have != want) continue;
        used[j] = found = true;
        ordered.push_back(bases[j]);
      }
      if (!found) throw Error(ErrorCode::SpaceMismatch, "no base matches a clique of the graph");
    }
    result = markov_combination_seq(d, ordered);
  }
  o.stdout_text << io::measure_to_json(result).dump() << '\n';
}

void check_consistency(const std::string& mu_path, const std::string& lambda_path, double tol, Output& o) {
  const auto mu = io::measure_from_json(load_json(mu_path));
  const auto lambda = io::measure_from_json(load_json(lambda_path));
  o.stdout_text << io::consistency_to_json(is_consistent(mu, lambda, tol)).dump() << '\n';
}

struct SampleOptions {
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  double eps = 1e-10;
  std::size_t max_atoms = 10000;
  std::size_t parallel = 1;
  std::string plot_csv;
};

void emit_samples(const DPParams& params, const SampleOptions& s, Output& o,
                  const std::function<void(const DiscreteAtoms&, json&)>& annotate) {
  const SamplerConfig cfg = sampler_config(s.seed, s.eps, s.max_atoms);
  const ProductSpace& space = params.base.space();
  std::vector<std::string> csv_rows(s.replicates);
  const auto lines = run_replicates(s.replicates, s.parallel, [&](std::size_t r) {
    RngStream rng(s.seed, r);
    const DiscreteAtoms theta = sample_dp(params, cfg, rng);
    json rec = io::atoms_to_json(theta, space, s.seed, r);
    if (annotate) annotate(theta, rec);
    csv_rows[r] = std::to_string(r) + "," + std::to_string(theta.atoms.size()) + "," +
                  io::format_decimal(theta.truncation_residual) + "," +
                  io::format_decimal(*std::max_element(theta.weights.begin(), theta.weights.end()));
    return rec.dump();
  });
  for (const auto& l : lines) o.stdout_text << l << '\n';
  if (!s.plot_csv.empty()) {
    std::string csv = "replicate,atoms,residual,max_weight\n";
    for (const auto& row : csv_rows) csv += row + "\n";
    o.files.emplace_back(s.plot_csv, std::move(csv));
  }
}

void posterior(const std::string& base_path, double nu, const std::string& data_path, Output& o) {
  const DPParams prior = load_dp(base_path, nu);
  auto in = open_input(data_path);
  const auto data = io::read_observations_csv(in, prior.base.space());
  o.stdout_text << io::dp_params_to_json(dp_posterior(prior, data)).dump() << '\n';
}

void build_hdp_cmd(const std::string& spec_path, bool strict, Output& o) {
  const HyperDirichletProcess model = load_hdp(spec_path, strict);
  json r = {{"decomposition", io::decomposition_to_json(model.spec.decomposition)},
            {"nu", model.spec.nu},
            {"combined_base", io::measure_to_json(model.combined.base)},
            {"refinement", io::refinement_to_json(model.refinement)}};
  o.stdout_text << r.dump() << '\n';
}

void posterior_hdp(const std::string& spec_path, const std::string& data_path, bool strict, Output& o) {
  const HyperDirichletProcess model = load_hdp(spec_path, strict);
  auto in = open_input(data_path);
  const auto data = io::read_observations_csv(in, model.combined.base.space());
  const HyperDirichletProcess post = hdp_posterior(model, data, BuildOptions{strict});
  o.stdout_text << io::hdp_spec_to_json(post.spec).dump() << '\n';
}

struct DiagnoseOptions {
  bool strict = false;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  double eps = 1e-10;
  std::size_t max_atoms = 10000;
};

void diagnose(const std::string& spec_path, const DiagnoseOptions& opt, Output& o) {
  const auto file = io::hdp_spec_from_json(load_json(spec_path));
  json checks = json::array();
  std::optional<ErrorCode> failure;
  std::string failure_message;
  json witness;
  auto record = [&](const std::string& name, bool passed, json details, ErrorCode code, const std::string& msg) {
    json c = {{"check", name}, {"passed", passed}};
    if (!details.is_null()) c["details"] = std::move(details);
    checks.push_back(std::move(c));
    if (!passed && !failure) {
      failure = code;
      failure_message = msg;
    }
    return passed;
  };
  auto finish = [&] {
    json report = {{"passed", !failure}, {"checks", checks}};
    if (failure) {
      json extra = {{"report", report}};
      if (!witness.is_null()) extra["witness"] = witness;
      throw ReportedError(*failure, failure_message, std::move(extra));
    }
    o.stdout_text << report.dump() << '\n';
  };

  const Graph& g = file.graph;
  if (!record("decomposable", is_decomposable(g), nullptr, ErrorCode::NotDecomposable,
              "graph has a chordless cycle of length >= 4") ||
      !record("connected", g.connected(), nullptr, ErrorCode::NotConnected, "graph is not connected")) {
    return finish();
  }
  const CliqueDecomposition d = perfect_ordering(g);
  record("decomposition", true, io::decomposition_to_json(d), ErrorCode::InvalidArgument, "");

  std::vector<DiscreteMeasure> bases;
  {
    std::vector<bool> used(file.clique_bases.size(), false);
    json missing = json::array();
    for (const auto& clique : d.cliques) {
      std::vector<std::string> want = clique;
      std::sort(want.begin(), want.end());
      bool found = false;
      for (std::size_t j = 0; j < file.clique_bases.size() && !found; ++j) {
        auto have = file.clique_bases[j].space().variables();
        std::sort(have.begin(), have.end());
        if (used[j] || have != want) continue;
        used[j] = found = true;
        bases.push_back(reorder(file.clique_bases[j], clique));
      }
      if (!found) missing.push_back(clique);
    }
    const bool ok = missing.empty() && bases.size() == file.clique_bases.size();
    if (!record("bases_match_cliques", ok, json{{"unmatched_cliques", missing}}, ErrorCode::CountMismatch,
                "clique bases do not match the graph's cliques")) {
      return finish();
    }
  }
  {
    json details = json::array();
    bool ok = true;
    for (const auto& b : bases) {
      const bool p = b.is_probability();
      ok = ok && p;
      details.push_back({{"clique", b.space().variables()}, {"total", io::format_decimal(b.total())}, {"ok", p}});
    }
    if (!record("bases_normalized", ok, details, ErrorCode::InvalidArgument, "a clique base is not normalized")) {
      return finish();
    }
  }
  {
    json details = json::array();
    bool ok = true;
    for (std::size_t i = 0; i < bases.size(); ++i) {
      for (std::size_t j = i + 1; j < bases.size(); ++j) {
        auto r = io::consistency_to_json(is_consistent(bases[i], bases[j]));
        ok = ok && r["consistent"].get<bool>();
        r["pair"] = {i + 1, j + 1};
        details.push_back(std::move(r));
      }
    }
    if (!record("pairwise_consistency", ok, details, ErrorCode::Inconsistent, "clique bases are not consistent")) {
      return finish();
    }
  }
  const DiscreteMeasure combined = markov_combination_seq(d, bases);
  record("combined_markov", is_markov(combined, d, 1e-12), nullptr, ErrorCode::NotMarkov,
         "combined base fails the clique factorization");
  {
    double gap = 0.0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
      gap = std::max(gap, linf_distance(marginalize(combined, d.cliques[i]), bases[i]));
    }
    record("clique_marginals", gap <= 1e-8, json{{"max_gap", io::format_decimal(gap)}}, ErrorCode::NotMarkov,
           "combined base does not reproduce its clique bases");
  }
  const RefinementReport refinement = refinement_report(combined, d, opt.strict);
  if (!refinement.passed()) witness = first_witness(refinement);
  record("refinement", refinement.passed(), io::refinement_to_json(refinement), ErrorCode::RefinementViolated,
         "refinement condition fails at a separator");

  if (opt.samples > 0) {
    const SamplerConfig cfg = sampler_config(opt.seed, opt.eps, opt.max_atoms);
    const DPParams params = make_dp_params(file.nu, combined);
    std::size_t markov_ok = 0, refine_ok = 0;
    for (std::size_t r = 0; r < opt.samples; ++r) {
      RngStream rng(opt.seed, r);
      const DiscreteAtoms theta = sample_dp(params, cfg, rng);
      if (verify_sample_markov(theta, combined.space(), d, opt.tol)) ++markov_ok;
      bool all = true;
      for (std::size_t k = 1; k < d.size(); ++k) {
        all = all && verify_sample_refinement(theta, combined.space(), d.separators[k], d.cliques[k]);
      }
      if (all) ++refine_ok;
    }
    const auto n = static_cast<double>(opt.samples);
    json details = {{"samples", opt.samples},
                    {"seed", opt.seed},
                    {"markov_passed", markov_ok},
                    {"refinement_passed", refine_ok},
                    {"markov_fraction", io::format_decimal(static_cast<double>(markov_ok) / n)},
                    {"refinement_fraction", io::format_decimal(static_cast<double>(refine_ok) / n)}};
    record("sampled_measures", markov_ok == opt.samples && refine_ok == opt.samples, details, ErrorCode::NotMarkov,
           "some sampled measures are not Markov on the graph");
  }
  finish();
}

void reconcile_cmd(const std::string& mu_path, const std::string& lambda_path, const std::string& strategy_name,
                   std::optional<double> gamma, Output& o) {
  const auto mu = io::measure_from_json(load_json(mu_path));
  const auto lambda = io::measure_from_json(load_json(lambda_path));
  const ReconcileStrategy s = ReconcileStrategy::parse(strategy_name, gamma);
  json r = {{"strategy", std::string(hyperdp::strategy_name(s.kind))}};
  switch (s.kind) {
    case ReconcileKind::RescaleMin:
    case ReconcileKind::RescaleConvex: {
      auto [m, l] = rescale(mu, lambda, s);
      r["mu"] = io::measure_to_json(m);
      r["lambda"] = io::measure_to_json(l);
      r["combined"] = io::measure_to_json(markov_combination(m, l));
      break;
    }
    case ReconcileKind::ConditionOnA: r["combined"] = io::measure_to_json(complete_via(mu, lambda, Side::A)); break;
    case ReconcileKind::ConditionOnB: r["combined"] = io::measure_to_json(complete_via(mu, lambda, Side::B)); break;
    case ReconcileKind::WeightedAverage: {
      const double g = gamma.value_or(mass_weighted_gamma(mu, lambda));
      r["gamma"] = io::format_decimal(g);
      r["combined"] = io::measure_to_json(weighted_average(mu, lambda, g));
      break;
    }
    case ReconcileKind::KlCompromise:
      r["separator"] = io::measure_to_json(kl_separator_compromise(mu, lambda));
      r["combined"] = io::measure_to_json(kl_compromise(mu, lambda));
      break;
  }
  o.stdout_text << r.dump() << '\n';
}

struct MixtureOptions {
  std::string data, likelihood, base, spec, plot_csv;
  double nu = 1.0;
  std::size_t sweeps = 100;
  std::uint64_t seed = 0;
};

void mixture_cmd(const MixtureOptions& opt, Output& o) {
  if (opt.base.empty() == opt.spec.empty()) {
    throw Error(ErrorCode::InvalidArgument, "mixture needs exactly one of --base or --spec");
  }
  if (!(opt.nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "--nu must be positive");
  const DiscreteMeasure base = opt.base.empty() ? load_hdp(opt.spec, false).combined.base
                                                : normalize(io::measure_from_json(load_json(opt.base)));
  auto in = open_input(opt.data);
  const auto data = io::read_observations_csv(in, base.space());
  const Likelihood likelihood = io::likelihood_from_json(load_json(opt.likelihood), base.space());
  RngStream rng(opt.seed, 0);
  const MixtureFit fit = run_gibbs(data, likelihood, opt.nu, base, opt.sweeps, rng);

  json classes = json::array();
  for (std::size_t k = 0; k < fit.class_counts.size(); ++k) {
    const auto it = std::find(fit.labels.begin(), fit.labels.end(), k);
    const Assignment& atom = fit.parameters[static_cast<std::size_t>(it - fit.labels.begin())];
    classes.push_back(
        {{"label", k}, {"size", fit.class_counts[k]}, {"atom", io::labeled_to_json(base.space().decode(atom))}});
  }
  json r = {{"seed", opt.seed},         {"sweeps", opt.sweeps},   {"nu", opt.nu},
            {"assignments", fit.labels}, {"class_counts", fit.class_counts}, {"classes", classes},
            {"trace", fit.trace}};
  o.stdout_text << r.dump() << '\n';
  if (!opt.plot_csv.empty()) {
    std::map<std::size_t, std::size_t> hist;
    for (std::size_t k : fit.trace) ++hist[k];
    std::string csv = "num_classes,sweeps\n";
    for (const auto& [k, c] : hist) csv += std::to_string(k) + "," + std::to_string(c) + "\n";
    o.files.emplace_back(opt.plot_csv, std::move(csv));
  }
}

struct CdfOptions {
  std::string data, base, uniform, grid, plot_csv;
  std::vector<double> t;
  double nu = 1.0;
};

void cdf_estimate(const CdfOptions& opt, Output& o) {
  if (opt.base.empty() == opt.uniform.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cdf-estimate needs exactly one of --base or --uniform");
  }
  if (!(opt.nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "--nu must be positive");
  CdfPrior prior;
  if (!opt.base.empty()) {
    prior = grid_prior(load_dp(opt.base, opt.nu));
  } else {
    const auto lohi = parse_list(opt.uniform, 2, "--uniform");
    prior = CdfPrior{opt.nu, uniform_base(lohi[0], lohi[1]).cdf};
  }
  auto in = open_input(opt.data);
  std::vector<double> data = io::read_reals_csv(in);
  std::sort(data.begin(), data.end());

  std::vector<double> ts = opt.t;
  if (!opt.grid.empty()) {
    const auto g = parse_list(opt.grid, 3, "--grid");
    const auto count = static_cast<std::size_t>(g[2]);
    if (count < 2 || static_cast<double>(count) != g[2]) {
      throw Error(ErrorCode::InvalidArgument, "--grid count must be an integer >= 2");
    }
    for (std::size_t i = 0; i < count; ++i) {
      ts.push_back(g[0] + (g[1] - g[0]) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  }
  if (ts.empty()) throw Error(ErrorCode::InvalidArgument, "give evaluation points via --t or --grid");

  const double n = static_cast<double>(data.size());
  json estimates = json::array();
  std::string csv = "t,prior,empirical,bayes\n";
  for (double t : ts) {
    const double prior_v = prior.base_cdf(t);
    const double emp = empirical_cdf(data, t);
    const double bayes = bayes_cdf(prior, data, t);
    estimates.push_back({{"t", io::format_decimal(t)},
                         {"prior", io::format_decimal(prior_v)},
                         {"empirical", io::format_decimal(emp)},
                         {"bayes", io::format_decimal(bayes)}});
    csv += io::format_decimal(t) + "," + io::format_decimal(prior_v) + "," + io::format_decimal(emp) + "," +
           io::format_decimal(bayes) + "\n";
  }
  json r = {{"nu", opt.nu},
            {"n", data.size()},
            {"data_weight", io::format_decimal(n / (opt.nu + n))},
            {"estimates", estimates}};
  o.stdout_text << r.dump() << '\n';
  if (!opt.plot_csv.empty()) o.files.emplace_back(opt.plot_csv, std::move(csv));
}

void write_error(std::ostream& err, std::string_view name, const std::string& message, const json& extra = {}) {
  json e = {{"error", name}, {"message", message}};
  if (extra.is_object()) {
    for (const auto& [k, v] : extra.items()) e[k] = v;
  }
  err << e.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hyperdp: hyper Dirichlet processes on decomposable graphs"};
  app.name("hyperdp");
  app.require_subcommand(1);
  app.footer(
      "Input CSV schemas:\n"
      "  observations (posterior, posterior-hdp, mixture): header row naming every model variable,\n"
      "    one observation per row, cells are category labels\n"
      "  reals (cdf-estimate): one number per row, optional header\n"
      "Output --plot-csv schemas:\n"
      "  sample, sample-hdp: replicate,atoms,residual,max_weight\n"
      "  mixture: num_classes,sweeps (histogram of class counts over sweeps)\n"
      "  cdf-estimate: t,prior,empirical,bayes\n"
      "Exit codes: 0 success, 1 validation error, 2 I/O error");
  app.set_help_all_flag("--help-all", "Show help for every command");

  // check-graph
  std::string graph_path;
  auto* c_graph = app.add_subcommand("check-graph", "Test decomposability and print the perfect clique ordering");
  c_graph->add_option("graph", graph_path, "Graph JSON {\"vertices\": [...], \"edges\": [[u,v],...]}")->required();

  // combine
  std::vector<std::string> combine_paths;
  std::string combine_graph;
  auto* c_combine = app.add_subcommand("combine", "Markov combination of consistent measures");
  c_combine->add_option("measures", combine_paths, "Measure JSON files (two, or one per clique with --graph)")
      ->required();
  c_combine->add_option("--graph", combine_graph, "Graph JSON; combine one base per clique in perfect order");

  // check-consistency
  std::string cc_mu, cc_lambda;
  double cc_tol = kDefaultConsistencyTolerance;
  auto* c_cons = app.add_subcommand("check-consistency", "Report both consistency conditions for two measures");
  c_cons->add_option("mu", cc_mu, "First measure JSON")->required();
  c_cons->add_option("lambda", cc_lambda, "Second measure JSON")->required();
  c_cons->add_option("--tol", cc_tol, "L-infinity / relative tolerance")->capture_default_str();

  // sample
  std::string s_base;
  double s_nu = 1.0;
  SampleOptions s_opt;
  auto* c_sample = app.add_subcommand("sample", "Draw truncated stick-breaking samples from DP(nu G) as JSONL");
  c_sample->add_option("--base", s_base, "Base probability measure JSON")->required();
  c_sample->add_option("--nu", s_nu, "Precision")->required();
  c_sample->footer("--plot-csv columns: replicate,atoms,residual,max_weight");

  // posterior
  std::string p_base, p_data;
  double p_nu = 1.0;
  auto* c_post = app.add_subcommand("posterior", "Conjugate DP posterior given categorical data");
  c_post->add_option("--base", p_base, "Base probability measure JSON")->required();
  c_post->add_option("--nu", p_nu, "Prior precision")->required();
  c_post->add_option("--data", p_data, "CSV, header row of variable names")->required();

  // build-hdp / sample-hdp / posterior-hdp / diagnose
  std::string h_spec, h_data;
  bool h_strict = false;
  bool h_verify = false;
  SampleOptions hs_opt;
  auto* c_build = app.add_subcommand("build-hdp", "Combine clique bases and validate the hyper Dirichlet process");
  c_build->add_option("--spec", h_spec, "HDP spec JSON {graph, nu, clique_bases}")->required();
  c_build->add_flag("--strict", h_strict, "Also require each history to refine its separator");

  auto* c_shdp = app.add_subcommand("sample-hdp", "Sample from a validated hyper Dirichlet process as JSONL");
  c_shdp->add_option("--spec", h_spec, "HDP spec JSON")->required();
  c_shdp->add_flag("--strict", h_strict, "Also require each history to refine its separator");
  c_shdp->add_flag("--verify", h_verify, "Annotate each sample with exact Markov and refinement checks");
  c_shdp->footer("--plot-csv columns: replicate,atoms,residual,max_weight");

  auto* c_phdp = app.add_subcommand("posterior-hdp", "Posterior HDP spec given full observations");
  c_phdp->add_option("--spec", h_spec, "HDP spec JSON")->required();
  c_phdp->add_option("--data", h_data, "CSV, header row of variable names")->required();
  c_phdp->add_flag("--strict", h_strict, "Also require each history to refine its separator");

  DiagnoseOptions d_opt;
  auto* c_diag = app.add_subcommand("diagnose", "Run every construction check on an HDP spec and report witnesses");
  c_diag->add_option("--spec", h_spec, "HDP spec JSON")->required();
  c_diag->add_flag("--strict", d_opt.strict, "Also require each history to refine its separator");
  c_diag->add_option("--samples", d_opt.samples, "Sampled measures to verify (0 = skip)")->capture_default_str();
  c_diag->add_option("--seed", d_opt.seed, "Random seed")->capture_default_str();
  c_diag->add_option("--tol", d_opt.tol, "Factorization tolerance for sampled measures")->capture_default_str();

  for (auto [cmd, opt] : {std::pair{c_sample, &s_opt}, std::pair{c_shdp, &hs_opt}}) {
    cmd->add_option("--replicates", opt->replicates, "Number of samples")->capture_default_str();
    cmd->add_option("--seed", opt->seed, "Random seed; replicate r uses stream r")->capture_default_str();
    cmd->add_option("--eps", opt->eps, "Stop once leftover stick mass is below eps")->capture_default_str();
    cmd->add_option("--max-atoms", opt->max_atoms, "Hard atom cap")->capture_default_str();
    cmd->add_option("--parallel", opt->parallel, "Worker threads; output order is unaffected")
        ->capture_default_str();
    cmd->add_option("--plot-csv", opt->plot_csv, "Write per-replicate summary CSV");
  }
  for (auto* cmd : {c_diag}) {
    cmd->add_option("--eps", d_opt.eps, "Stop once leftover stick mass is below eps")->capture_default_str();
    cmd->add_option("--max-atoms", d_opt.max_atoms, "Hard atom cap")->capture_default_str();
  }

  // reconcile
  std::string r_mu, r_lambda, r_strategy;
  std::optional<double> r_gamma;
  auto* c_rec = app.add_subcommand("reconcile", "Combine two non-consistent clique measures");
  c_rec->add_option("--mu", r_mu, "Measure on clique A")->required();
  c_rec->add_option("--lambda", r_lambda, "Measure on clique B")->required();
  c_rec->add_option("--strategy", r_strategy, "Reconciliation strategy")
      ->required()
      ->check(CLI::IsMember({"rescale-min", "rescale-convex", "condition-a", "condition-b", "average", "kl"}));
  c_rec->add_option("--gamma", r_gamma, "Weight in [0,1] for rescale-convex and average");

  // mixture
  MixtureOptions m_opt;
  auto* c_mix = app.add_subcommand("mixture", "Latent-class Gibbs sampler with a DP or HDP base");
  c_mix->add_option("--data", m_opt.data, "Observation CSV")->required();
  c_mix->add_option("--likelihood", m_opt.likelihood, "Likelihood JSON (symmetric-noise or table)")->required();
  c_mix->add_option("--base", m_opt.base, "Base measure JSON");
  c_mix->add_option("--spec", m_opt.spec, "HDP spec JSON; its combined base is used");
  c_mix->add_option("--nu", m_opt.nu, "Precision a")->required();
  c_mix->add_option("--sweeps", m_opt.sweeps, "Gibbs sweeps")->capture_default_str();
  c_mix->add_option("--seed", m_opt.seed, "Random seed")->capture_default_str();
  c_mix->add_option("--plot-csv", m_opt.plot_csv, "Write class-count histogram CSV");
  c_mix->footer("--plot-csv columns: num_classes,sweeps");

  // cdf-estimate
  CdfOptions f_opt;
  auto* c_cdf = app.add_subcommand("cdf-estimate", "Bayes estimate of a CDF under a DP prior");
  c_cdf->add_option("--data", f_opt.data, "Single-column CSV of reals")->required();
  c_cdf->add_option("--nu", f_opt.nu, "Prior precision")->required();
  c_cdf->add_option("--base", f_opt.base, "Single-variable base measure with numeric categories");
  c_cdf->add_option("--uniform", f_opt.uniform, "Uniform base on lo,hi");
  c_cdf->add_option("--t", f_opt.t, "Evaluation points");
  c_cdf->add_option("--grid", f_opt.grid, "Evaluation grid from,to,count");
  c_cdf->add_option("--plot-csv", f_opt.plot_csv, "Write estimate CSV");
  c_cdf->footer("--plot-csv columns: t,prior,empirical,bayes");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    write_error(err, "InvalidArgument", e.what());
    return kExitValidation;
  }

  Output o;
  try {
    if (*c_graph) check_graph(graph_path, o);
    else if (*c_combine) combine(combine_paths, combine_graph, o);
    else if (*c_cons) check_consistency(cc_mu, cc_lambda, cc_tol, o);
    else if (*c_sample) emit_samples(load_dp(s_base, s_nu), s_opt, o, nullptr);
    else if (*c_post) posterior(p_base, p_nu, p_data, o);
    else if (*c_build) build_hdp_cmd(h_spec, h_strict, o);
    else if (*c_shdp) {
      const HyperDirichletProcess model = load_hdp(h_spec, h_strict);
      const auto& d = model.spec.decomposition;
      const ProductSpace& space = model.combined.base.space();
      std::function<void(const DiscreteAtoms&, json&)> annotate;
      if (h_verify) {
        annotate = [&](const DiscreteAtoms& theta, json& rec) {
          rec["markov"] = verify_sample_markov(theta, space, d, 1e-9);
          bool all = true;
          for (std::size_t k = 1; k < d.size(); ++k) {
            all = all && verify_sample_refinement(theta, space, d.separators[k], d.cliques[k]);
          }
          rec["refinement"] = all;
        };
      }
      emit_samples(model.combined, hs_opt, o, annotate);
    } else if (*c_phdp) posterior_hdp(h_spec, h_data, h_strict, o);
    else if (*c_diag) diagnose(h_spec, d_opt, o);
    else if (*c_rec) reconcile_cmd(r_mu, r_lambda, r_strategy, r_gamma, o);
    else if (*c_mix) mixture_cmd(m_opt, o);
    else if (*c_cdf) cdf_estimate(f_opt, o);
  } catch (const IoError& e) {
    write_error(err, "IoError", e.what());
    return kExitIo;
  } catch (const ReportedError& e) {
    write_error(err, e.name(), e.what(), e.extra());
    return kExitValidation;
  } catch (const RefinementViolatedError& e) {
    write_error(err, e.name(), e.what(),
                json{{"witness", first_witness(e.report())}, {"report", io::refinement_to_json(e.report())}});
    return kExitValidation;
  } catch (const Error& e) {
    write_error(err, e.name(), e.what());
    return kExitValidation;
  } catch (const json::exception& e) {
    write_error(err, "ParseError", e.what());
    return kExitValidation;
  }

  for (const auto& [path, content] : o.files) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << content)) {
      write_error(err, "IoError", "cannot write '" + path + "'");
      return kExitIo;
    }
  }
  out << o.stdout_text.str();
  return kExitOk;
}

}  // namespace hyperdp::cli
