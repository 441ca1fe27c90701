// Compares the coalition-enumeration engines: the unpruned serial reference
// sweep, the pruned serial search, and the pruned OpenMP search. All three
// return identical verdicts; the point is the constant factor.
//
//   ./restake-bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "restake/generators.hpp"
#include "restake/security.hpp"

namespace {

using namespace restake;

GeneratedInstance dense_instance(std::uint32_t n) {
  RandomSpec spec;
  spec.num_services = 5;
  spec.num_validators = n;
  spec.density_percent = 70;
  spec.seed = 20240 + n;
  spec.force = ForceMode::Secure;  // secure graphs are the worst case: no early witness
  return gen_random(spec);
}

// Complete bipartite, unit stakes, attack threshold at half the validators,
// value balanced so every coalition's profit is exactly zero at the
// threshold. Secure, but the profit bound stays live deep into the tree, so
// the search degenerates toward choose(n, n/2) nodes: the case where the
// prefix split across threads actually pays.
std::pair<RestakingGraph, StakeVector> balanced_instance(std::uint32_t n) {
  const std::uint32_t k = n / 2;
  std::vector<ServiceSpec> services;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId s = 1; s <= k; ++s) {
    services.push_back({s, Rat(1), Rat(2 * static_cast<long>(k) - 1, 2 * static_cast<long>(n))});
    for (NodeId v = 1; v <= n; ++v) edges.emplace_back(s, v);
  }
  std::vector<NodeId> validators;
  std::vector<std::pair<NodeId, Rat>> stakes;
  for (NodeId v = 1; v <= n; ++v) {
    validators.push_back(v);
    stakes.emplace_back(v, Rat(1));
  }
  return {RestakingGraph::create(std::move(services), std::move(validators), std::move(edges)),
          StakeVector(std::move(stakes))};
}

void BM_reference_sweep(benchmark::State& state) {
  const auto inst = dense_instance(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) {
    auto verdict = is_secure_reference(inst.graph, inst.stakes);
    benchmark::DoNotOptimize(verdict.secure);
  }
}

void BM_pruned_serial(benchmark::State& state) {
  const auto inst = dense_instance(static_cast<std::uint32_t>(state.range(0)));
  SecurityOptions opts;
  opts.parallel = false;
  for (auto _ : state) {
    auto verdict = is_secure_exact(inst.graph, inst.stakes, opts);
    benchmark::DoNotOptimize(verdict.secure);
  }
}

void BM_pruned_parallel(benchmark::State& state) {
  const auto inst = dense_instance(static_cast<std::uint32_t>(state.range(0)));
  SecurityOptions opts;
  opts.parallel = true;
  for (auto _ : state) {
    auto verdict = is_secure_exact(inst.graph, inst.stakes, opts);
    benchmark::DoNotOptimize(verdict.secure);
  }
}

void BM_family_check(benchmark::State& state) {
  const auto [graph, stakes] = gen_rs_lower_family(static_cast<std::uint32_t>(state.range(0)));
  SecurityOptions opts;
  opts.enumeration_cap = 64;
  for (auto _ : state) {
    auto verdict = is_secure_exact(graph, stakes, opts);
    benchmark::DoNotOptimize(verdict.secure);
  }
}

void BM_balanced_serial(benchmark::State& state) {
  const auto [graph, stakes] = balanced_instance(static_cast<std::uint32_t>(state.range(0)));
  SecurityOptions opts;
  opts.parallel = false;
  for (auto _ : state) {
    auto verdict = is_secure_exact(graph, stakes, opts);
    benchmark::DoNotOptimize(verdict.secure);
  }
}

void BM_balanced_parallel(benchmark::State& state) {
  const auto [graph, stakes] = balanced_instance(static_cast<std::uint32_t>(state.range(0)));
  SecurityOptions opts;
  opts.parallel = true;
  for (auto _ : state) {
    auto verdict = is_secure_exact(graph, stakes, opts);
    benchmark::DoNotOptimize(verdict.secure);
  }
}

BENCHMARK(BM_reference_sweep)->Arg(12)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pruned_serial)->Arg(12)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pruned_parallel)->Arg(12)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_family_check)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_balanced_serial)->Arg(18)->Arg(20)->Arg(22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_balanced_parallel)->Arg(18)->Arg(20)->Arg(22)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
