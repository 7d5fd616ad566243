// Acceptance suite: one PASS/FAIL line per criterion. Tolerances, replicate
// counts and seeds are fixed here; the process exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "generators.hpp"
#include "hyperdp/dirichlet_process.hpp"
#include "hyperdp/graph.hpp"
#include "hyperdp/hyper_dp.hpp"
#include "hyperdp/measure.hpp"
#include "hyperdp/mixture.hpp"
#include "hyperdp/reconcile.hpp"
#include "oracles.hpp"

using namespace hyperdp;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = no limit
  std::function<Outcome()> body;
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << v;
  return ss.str();
}

ProductSpace binary(std::vector<std::string> vars) {
  std::vector<std::vector<std::string>> doms(vars.size(), {"0", "1"});
  return ProductSpace(std::move(vars), std::move(doms));
}

Graph path_ijk() { return Graph::build({"I", "J", "K"}, {{"I", "J"}, {"J", "K"}}); }

DiscreteMeasure k_copies_j() {
  DiscreteMeasure m(binary({"J", "K"}));
  m.add({0, 0}, 0.5);
  m.add({1, 1}, 0.5);
  return m;
}

std::string data(const std::string& name) { return std::string(HYPERDP_TEST_DATA_DIR) + "/" + name; }

// ------------------------------------------------------------------ 1

Outcome chordality() {
  int agree = 0;
  for (std::uint32_t mask = 0; mask < 1024; ++mask) {
    VertexList vs{"a", "b", "c", "d", "e"};
    std::vector<std::pair<std::string, std::string>> edges;
    oracle::Adjacency adj(5, 0);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = i + 1; j < 5; ++j, ++bit) {
        if (mask >> bit & 1) {
          edges.emplace_back(vs[i], vs[j]);
          adj[i] |= 1u << j;
          adj[j] |= 1u << i;
        }
      }
    }
    const bool lib = is_decomposable(Graph::build(vs, edges));
    agree += lib == !oracle::has_chordless_cycle(adj) ? 1 : 0;
  }
  return {agree == 1024, std::to_string(agree) + "/1024 graphs agree"};
}

// ------------------------------------------------------------------ 2, 3

std::vector<gen::Pair> consistent_pairs() {
  RngStream rng(20240601, 0);
  std::vector<gen::Pair> pairs;
  for (int i = 0; i < 200; ++i) pairs.push_back(gen::consistent_pair(rng));
  return pairs;
}

oracle::Adjacency two_clique_adjacency(const std::vector<std::string>& vars, const std::vector<std::string>& a,
                                       const std::vector<std::string>& b) {
  oracle::Adjacency adj(vars.size(), 0);
  auto in = [](const std::vector<std::string>& s, const std::string& v) {
    return std::find(s.begin(), s.end(), v) != s.end();
  };
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (i == j) continue;
      if ((in(a, vars[i]) && in(a, vars[j])) || (in(b, vars[i]) && in(b, vars[j]))) adj[i] |= 1u << j;
    }
  }
  return adj;
}

Outcome combination_contract() {
  double worst_marginal = 0.0, worst_oracle = 0.0;
  int markov = 0, ci = 0;
  const auto pairs = consistent_pairs();
  for (const auto& [mu, lambda] : pairs) {
    const auto m = markov_combination(mu, lambda);
    const auto& av = mu.space().variables();
    const auto& bv = lambda.space().variables();
    worst_marginal = std::max(worst_marginal, linf_distance(marginalize(m, av), mu));
    worst_marginal = std::max(worst_marginal, linf_distance(marginalize(m, bv), lambda));
    markov += is_markov(m, two_clique_decomposition(av, bv), 1e-12) ? 1 : 0;
    const auto expected = oracle::pointwise_combination(oracle::to_table(mu), oracle::to_table(lambda));
    worst_oracle = std::max(worst_oracle, oracle::linf(m, expected));
    const auto table = oracle::to_table(m);
    ci += oracle::markov_by_ci(table, two_clique_adjacency(table.vars, av, bv), 1e-12) ? 1 : 0;
  }
  const bool pass = worst_marginal <= 1e-12 && markov == 200 && worst_oracle <= 1e-12 && ci == 200;
  return {pass, "max marginal gap " + fmt(worst_marginal) + ", is_markov " + std::to_string(markov) +
                    "/200, pointwise-oracle gap " + fmt(worst_oracle) + ", CI oracle " + std::to_string(ci) +
                    "/200"};
}

Outcome commutation() {
  double worst = 0.0;
  for (const auto& [mu, lambda] : consistent_pairs()) {
    worst = std::max(worst, linf_distance(normalize(markov_combination(mu, lambda)),
                                          markov_combination(normalize(mu), normalize(lambda))));
  }
  return {worst <= 1e-12, "max L-inf gap " + fmt(worst) + " over 200 pairs"};
}

// ------------------------------------------------------------------ 4

Outcome dirichlet_moments() {
  const std::size_t m = 20000;
  const DPParams p = make_dp_params(4.0, DiscreteMeasure::uniform(ProductSpace({"X"}, {{"0", "1"}})));
  const SamplerConfig cfg{1234, 1e-10, 10000};
  double s = 0.0, s2 = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const auto theta = sample_dp(p, cfg, r);
    double mass0 = 0.0;
    for (std::size_t i = 0; i < theta.atoms.size(); ++i) {
      if (theta.atoms[i][0] == 0) mass0 += theta.weights[i];
    }
    s += mass0;
    s2 += mass0 * mass0;
  }
  const double mean = s / static_cast<double>(m);
  const double var = (s2 - static_cast<double>(m) * mean * mean) / static_cast<double>(m - 1);
  const double true_var = 0.5 * 0.5 / (4.0 + 1.0);
  const double sigma_mc = std::sqrt(true_var / static_cast<double>(m));
  const double z = std::abs(mean - 0.5) / sigma_mc;
  const double rel = std::abs(var - true_var) / true_var;
  return {z <= 3.0 && rel <= 0.10,
          "mean " + fmt(mean, 6) + " (" + fmt(z, 3) + " sigma), variance " + fmt(var, 5) + " vs 0.05 (" +
              fmt(100 * rel, 3) + "% off)"};
}

// ------------------------------------------------------------------ 5

Outcome posterior_exactness() {
  RngStream rng(555);
  const ProductSpace s({"X", "Y"}, {{"a", "b", "c"}, {"0", "1"}});
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const DPParams p = make_dp_params(0.1 + 10.0 * rng.uniform(), gen::measure(s, rng, 0.3));
    std::vector<Assignment> data(1 + rng.uniform_index(40));
    for (auto& x : data) x = {Category(rng.uniform_index(3)), Category(rng.uniform_index(2))};
    DPParams seq = p;
    for (const auto& x : data) seq = dp_posterior(seq, std::span<const Assignment>(&x, 1));
    const DPParams batch = dp_posterior(p, data);
    worst = std::max({worst, std::abs(seq.nu - batch.nu), linf_distance(seq.base, batch.base)});
  }
  const DPParams fixture = make_dp_params(2.0, DiscreteMeasure::uniform(ProductSpace({"X"}, {{"0", "1"}})));
  const std::vector<Assignment> zero{{0}};
  const double g0 = dp_posterior(fixture, zero).base.at({0});
  return {worst <= 1e-12 && g0 == 2.0 / 3.0,
          "max sequential/batch gap " + fmt(worst) + " over 100 data sets; fixture G'({0}) = " + fmt(g0, 17)};
}

// ------------------------------------------------------------------ 6

Outcome bayes_cdf_identity() {
  RngStream rng(66);
  double worst = 0.0;
  int points = 0;
  bool monotone = true;
  for (int cfg = 0; cfg < 100; ++cfg) {
    const CdfPrior prior{0.05 + 20.0 * rng.uniform(), uniform_base(0.0, 1.0).cdf};
    std::vector<double> data(rng.uniform_index(51));
    for (auto& x : data) x = rng.uniform();
    std::sort(data.begin(), data.end());
    std::vector<double> ts(10);
    for (auto& t : ts) t = -0.25 + 1.5 * rng.uniform();
    std::sort(ts.begin(), ts.end());
    double prev = -INFINITY;
    for (double t : ts) {
      const double convex = bayes_cdf(prior, data, t);
      worst = std::max(worst, std::abs(convex - bayes_cdf_ratio(prior, data, t)));
      monotone = monotone && convex >= prev;
      prev = convex;
      ++points;
    }
  }
  return {worst <= 1e-12 && monotone && points == 1000,
          std::to_string(points) + " (nu, n, t) points, max form gap " + fmt(worst) +
              (monotone ? ", monotone in t" : ", NOT monotone in t")};
}

// ------------------------------------------------------------------ 7

Outcome hyper_markov_sampling() {
  const auto model = build_hdp(path_ijk(), {DiscreteMeasure::uniform(binary({"I", "J"})), k_copies_j()}, 4.0);
  const auto& d = model.spec.decomposition;
  const ProductSpace& s = model.combined.base.space();
  int markov = 0, refine = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    RngStream rng(7, r);
    const auto theta = sample_hdp(model, SamplerConfig{}, rng);
    markov += verify_sample_markov(theta, s, d, 1e-9) ? 1 : 0;
    refine += verify_sample_refinement(theta, s, d.separators[1], d.cliques[1]) ? 1 : 0;
  }
  // Negative control: same graph, uniform clique bases, so refinement fails.
  const auto uniform = markov_combination(DiscreteMeasure::uniform(binary({"I", "J"})),
                                          DiscreteMeasure::uniform(binary({"J", "K"})));
  const DPParams control = make_dp_params(4.0, uniform);
  int control_fail = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    RngStream rng(77, r);
    control_fail += verify_sample_markov(sample_dp(control, SamplerConfig{}, rng), s, d, 1e-9) ? 0 : 1;
  }
  return {markov == 1000 && refine == 1000 && control_fail > 500,
          "valid model: Markov " + std::to_string(markov) + "/1000, refinement " + std::to_string(refine) +
              "/1000; uniform control fails " + std::to_string(control_fail) + "/1000"};
}

// ------------------------------------------------------------------ 8

Outcome posterior_hdp() {
  const auto model = build_hdp(path_ijk(), {DiscreteMeasure::uniform(binary({"I", "J"})), k_copies_j()}, 4.0);
  const ProductSpace& s = model.combined.base.space();
  RngStream rng(88);
  const auto theta = to_measure(sample_hdp(model, SamplerConfig{}, rng), s);
  const MeasureSampler pick(theta);
  std::vector<Assignment> obs;
  for (int i = 0; i < 50; ++i) obs.push_back(pick(rng));
  const auto post = hdp_posterior(model, obs);
  const auto& d = post.spec.decomposition;
  const bool refinement = post.refinement.passed() && refinement_report(post.combined.base, d).passed();

  oracle::Table joint = oracle::to_table(model.combined.base);
  for (auto& p : joint.p) p *= model.spec.nu;
  for (const auto& x : obs) joint.p[joint.index({x[0], x[1], x[2]})] += 1.0;
  for (auto& p : joint.p) p /= model.spec.nu + 50.0;
  double gap = 0.0;
  for (const auto& h : post.spec.clique_bases) {
    gap = std::max(gap, oracle::linf(h, oracle::marginal(joint, h.space().variables())));
  }
  int markov = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    RngStream draw(8, r);
    markov += verify_sample_markov(sample_hdp(post, SamplerConfig{}, draw), s, d, 1e-9) ? 1 : 0;
  }
  return {refinement && gap <= 1e-12 && markov == 1000 && post.spec.nu == 54.0,
          std::string("refinement ") + (refinement ? "passes" : "FAILS") + ", clique-update gap " + fmt(gap) +
              ", posterior draws Markov " + std::to_string(markov) + "/1000"};
}

// ------------------------------------------------------------------ 9

Outcome kl_compromise_grid() {
  RngStream rng(99);
  double worst = 0.0;
  bool objective_ok = true;
  for (int f = 0; f < 20; ++f) {
    const std::size_t k = f < 10 ? 2 : 3;
    std::vector<std::string> w_dom = gen::labels(k);
    const ProductSpace uw({"U", "W"}, {{"0", "1"}, w_dom});
    const ProductSpace wv({"W", "V"}, {w_dom, {"0", "1"}});
    const auto mu = gen::measure(uw, rng, 0.0, 0.5 + rng.uniform());
    const auto lambda = gen::measure(wv, rng, 0.0, 0.5 + rng.uniform());
    const auto mc = normalize(marginalize(mu, {"W"}));
    const auto lc = normalize(marginalize(lambda, {"W"}));
    std::vector<double> p, r;
    for (Category c = 0; c < k; ++c) {
      p.push_back(mc.at({c}));
      r.push_back(lc.at({c}));
    }
    const auto closed = kl_separator_compromise(mu, lambda);
    const auto grid = oracle::kl_grid_minimiser(p, r, 1e-4);
    DiscreteMeasure grid_measure(closed.space());
    for (Category c = 0; c < k; ++c) {
      worst = std::max(worst, std::abs(closed.at({c}) - grid[c]));
      if (grid[c] > 0.0) grid_measure.add({c}, grid[c]);
    }
    objective_ok = objective_ok && summed_kl(mc, lc, closed) <= summed_kl(mc, lc, grid_measure) + 1e-12;
  }
  return {worst <= 1e-4 && objective_ok,
          "max |closed form - grid argmin| " + fmt(worst) + " over 20 fixtures (10 binary, 10 ternary)" +
              (objective_ok ? "" : "; closed form objective exceeds grid optimum")};
}

// ------------------------------------------------------------------ 10

Outcome urn_statistics() {
  std::string detail;
  bool pass = true;
  const std::size_t reps = 50000;
  for (double a : {0.5, 1.0, 2.0}) {
    for (std::size_t n : {std::size_t{3}, std::size_t{10}}) {
      double expected = 0.0;
      for (std::size_t i = 1; i <= n; ++i) expected += a / (a + static_cast<double>(i) - 1.0);
      RngStream rng(1000 + static_cast<std::uint64_t>(a * 10), n);
      double s = 0.0, s2 = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto labels = sample_partition(a, uniform_base(0.0, 1.0), n, rng);
        const double k = static_cast<double>(*std::max_element(labels.begin(), labels.end()) + 1);
        s += k;
        s2 += k * k;
      }
      const double mean = s / reps;
      const double sd = std::sqrt((s2 - reps * mean * mean) / (reps - 1));
      const double z = std::abs(mean - expected) / (sd / std::sqrt(double(reps)));
      const bool ok = z <= 3.0 && std::abs(expected_clusters(a, n) - expected) <= 1e-12;
      pass = pass && ok;
      detail += "(a=" + fmt(a) + ",n=" + std::to_string(n) + ") z=" + fmt(z, 2) + "; ";
    }
  }

  // Gibbs: three observations, three-category base, noisy likelihood.
  const ProductSpace s({"X"}, {{"0", "1", "2"}});
  DiscreteMeasure base(s);
  const std::vector<double> g{0.5, 0.3, 0.2};
  for (Category c = 0; c < 3; ++c) base.add({c}, g[c]);
  const std::vector<Assignment> data{{0}, {0}, {2}};
  auto f = [](Category x, Category pi) { return x == pi ? 0.6 : 0.2; };
  const Likelihood lik = [&](const Assignment& x, const Assignment& pi) { return f(x[0], pi[0]); };
  const double a = 1.0;
  const auto exact = oracle::partition_posterior(g, a, 3, [&](std::size_t i, std::size_t pi) {
    return f(data[i][0], static_cast<Category>(pi));
  });
  const std::size_t chains = 20000, sweeps = 30;
  std::map<std::vector<std::size_t>, double> freq;
  for (std::size_t c = 0; c < chains; ++c) {
    RngStream rng(4242, c);
    const auto fit = run_gibbs(data, lik, a, base, sweeps, rng);
    freq[oracle::canonical_partition(fit.parameters)] += 1.0 / chains;
  }
  double worst_z = 0.0;
  for (const auto& [part, p] : exact) {
    const double z = std::abs(freq[part] - p) / std::sqrt(p * (1 - p) / chains);
    worst_z = std::max(worst_z, z);
  }
  pass = pass && exact.size() == 5 && worst_z <= 3.0;
  detail += "gibbs partitions worst z=" + fmt(worst_z, 2) + " over " + std::to_string(exact.size()) +
            " partitions";
  return {pass, detail};
}

// ------------------------------------------------------------------ 11

struct Run {
  int code;
  std::string out;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str() + "\x1f" + err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string run_binary(const std::string& cmdline) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmdline.c_str(), "r"), pclose);
  if (!pipe) return "<popen failed>";
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe.get())) > 0) out.append(buf, n);
  return out;
}

Outcome cli_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "hyperdp_acceptance";
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "plot.csv").string();
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--base", data("binary_uniform.json"), "--nu", "4", "--replicates", "25", "--seed", "7",
       "--plot-csv", csv},
      {"sample", "--base", data("binary_uniform.json"), "--nu", "4", "--replicates", "25", "--seed", "7",
       "--parallel", "4", "--plot-csv", csv},
      {"sample-hdp", "--spec", data("path_valid.json"), "--replicates", "25", "--seed", "11", "--verify",
       "--plot-csv", csv},
      {"sample-hdp", "--spec", data("path_valid.json"), "--replicates", "25", "--seed", "11", "--verify",
       "--parallel", "3", "--plot-csv", csv},
      {"diagnose", "--spec", data("path_valid.json"), "--samples", "50", "--seed", "5"},
      {"diagnose", "--spec", data("path_uniform.json"), "--samples", "50", "--seed", "5"},
      {"mixture", "--data", data("observations.csv"), "--likelihood", data("noise.json"), "--spec",
       data("path_valid.json"), "--nu", "1", "--sweeps", "40", "--seed", "3", "--plot-csv", csv},
      {"mixture", "--data", data("observations.csv"), "--likelihood", data("noise.json"), "--base",
       data("binary_uniform.json"), "--nu", "1", "--sweeps", "5", "--seed", "3"},
  };
  int identical = 0;
  std::vector<std::string> first_outputs;
  for (const auto& cmd : commands) {
    std::filesystem::remove(csv);
    const Run a = cli(cmd);
    const std::string csv_a = slurp(csv);
    std::filesystem::remove(csv);
    const Run b = cli(cmd);
    const std::string csv_b = slurp(csv);
    identical += (a.code == b.code && a.out == b.out && csv_a == csv_b) ? 1 : 0;
    first_outputs.push_back(a.out + csv_a);
  }
  // --parallel must not change the bytes either.
  const bool parallel_same = first_outputs[0] == first_outputs[1] && first_outputs[2] == first_outputs[3];
  // Same check across separate processes of the installed binary.
  const std::string cmdline = std::string(HYPERDP_CLI_BINARY) + " sample --base " + data("binary_uniform.json") +
                              " --nu 4 --replicates 10 --seed 7 2>&1";
  const std::string p1 = run_binary(cmdline);
  const std::string p2 = run_binary(cmdline);
  const bool process_same = p1 == p2 && !p1.empty();
  const int total = static_cast<int>(commands.size());
  return {identical == total && parallel_same && process_same,
          std::to_string(identical) + "/" + std::to_string(total) + " commands byte-identical on rerun; --parallel " +
              (parallel_same ? "matches serial" : "DIFFERS") + "; separate processes " +
              (process_same ? "match" : "DIFFER")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "chordality oracle equivalence", 10.0, chordality},
      {2, "Markov combination contract", 5.0, combination_contract},
      {3, "normalization commutes with combination", 0.0, commutation},
      {4, "Dirichlet moments", 60.0, dirichlet_moments},
      {5, "posterior exactness", 0.0, posterior_exactness},
      {6, "Bayes CDF identity", 0.0, bayes_cdf_identity},
      {7, "hyper Markov sampling", 0.0, hyper_markov_sampling},
      {8, "posterior hyper Dirichlet process", 0.0, posterior_hdp},
      {9, "KL compromise against grid search", 0.0, kl_compromise_grid},
      {10, "urn statistics", 120.0, urn_statistics},
      {11, "CLI determinism", 0.0, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt(secs, 3) + " s";
    if (c.time_limit_s > 0.0) {
      timing += " (limit " + fmt(c.time_limit_s) + " s)";
      if (secs > c.time_limit_s) o.pass = false;
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << "; " << timing
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
