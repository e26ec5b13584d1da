#include <map>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "rcd/graph.hpp"
#include "rcd/kernels.hpp"

namespace {

struct Fixture {
  rcd::PathSet paths;
  Eigen::VectorXd lipschitz;
  std::vector<double> weights;
  Eigen::VectorXd v;
};

const Fixture& fixture(int n, int tau) {
  static std::map<std::pair<int, int>, Fixture> cache;
  auto [it, fresh] = cache.try_emplace({n, tau});
  if (fresh) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    auto& f = it->second;
    f.paths = rcd::enumerate_paths(rcd::make_topology({rcd::TopologyKind::complete, n}), tau);
    f.lipschitz = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
    f.v = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng) - 5.0; });
    f.weights.assign(f.paths.size(), 1.0 / static_cast<double>(f.paths.size()));
  }
  return it->second;
}

template <auto Assemble>
void assemble(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Assemble(f.lipschitz, f.paths, f.weights));
  state.counters["paths"] = static_cast<double>(f.paths.size());
}

template <auto Forms>
void quadratic_forms(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  std::vector<double> out(f.paths.size());
  for (auto _ : state) {
    Forms(f.lipschitz, f.paths, f.v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["paths"] = static_cast<double>(f.paths.size());
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({50, 2})->Args({200, 2})->Args({30, 3})->Args({60, 3})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(assemble<rcd::kernels::serial::assemble_g_tau>)->Name("assemble_g_tau/serial")->Apply(sizes);
BENCHMARK(assemble<rcd::kernels::parallel::assemble_g_tau>)->Name("assemble_g_tau/parallel")->Apply(sizes);
BENCHMARK(quadratic_forms<rcd::kernels::serial::path_quadratic_forms>)
    ->Name("path_quadratic_forms/serial")->Apply(sizes);
BENCHMARK(quadratic_forms<rcd::kernels::parallel::path_quadratic_forms>)
    ->Name("path_quadratic_forms/parallel")->Apply(sizes);

BENCHMARK_MAIN();
