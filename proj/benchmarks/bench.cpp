#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "hyperdp/dirichlet_process.hpp"
#include "hyperdp/graph.hpp"
#include "hyperdp/hyper_dp.hpp"
#include "hyperdp/measure.hpp"

using namespace hyperdp;

namespace {

ProductSpace cube(std::vector<std::string> vars, std::size_t card) {
  std::vector<std::string> dom;
  for (std::size_t i = 0; i < card; ++i) dom.push_back(std::to_string(i));
  std::vector<std::vector<std::string>> doms(vars.size(), dom);
  return ProductSpace(std::move(vars), std::move(doms));
}

void BM_SampleDp(benchmark::State& state) {
  const double nu = static_cast<double>(state.range(0));
  const DPParams p = make_dp_params(nu, DiscreteMeasure::uniform(cube({"X", "Y"}, 4)));
  const SamplerConfig cfg{7, 1e-10, 100000};
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_dp(p, cfg, r++));
}
BENCHMARK(BM_SampleDp)->Arg(1)->Arg(10)->Arg(100);

void BM_MarkovCombination(benchmark::State& state) {
  const auto card = static_cast<std::size_t>(state.range(0));
  const auto mu = DiscreteMeasure::uniform(cube({"A", "B", "S"}, card));
  const auto lambda = DiscreteMeasure::uniform(cube({"S", "C", "D"}, card));
  for (auto _ : state) benchmark::DoNotOptimize(markov_combination(mu, lambda));
}
BENCHMARK(BM_MarkovCombination)->Arg(2)->Arg(4)->Arg(6);

void BM_IsDecomposable(benchmark::State& state) {
  // A chain of triangles: chordal, with n vertices.
  const auto n = static_cast<std::size_t>(state.range(0));
  VertexList vs;
  for (std::size_t i = 0; i < n; ++i) vs.push_back("v" + std::to_string(i));
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    edges.emplace_back(vs[i], vs[i + 1]);
    if (i + 2 < n) edges.emplace_back(vs[i], vs[i + 2]);
  }
  const Graph g = Graph::build(vs, edges);
  for (auto _ : state) benchmark::DoNotOptimize(is_decomposable(g));
}
BENCHMARK(BM_IsDecomposable)->Arg(16)->Arg(256)->Arg(4096);

void BM_SampleHdp(benchmark::State& state) {
  const Graph g = Graph::build({"I", "J", "K"}, {{"I", "J"}, {"J", "K"}});
  DiscreteMeasure jk(cube({"J", "K"}, 2));
  jk.add({0, 0}, 0.5);
  jk.add({1, 1}, 0.5);
  const auto model = build_hdp(g, {DiscreteMeasure::uniform(cube({"I", "J"}, 2)), jk}, 4.0);
  std::uint64_t r = 0;
  for (auto _ : state) {
    RngStream rng(3, r++);
    benchmark::DoNotOptimize(sample_hdp(model, SamplerConfig{}, rng));
  }
}
BENCHMARK(BM_SampleHdp);

}  // namespace
BENCHMARK_MAIN();
