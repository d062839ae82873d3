#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "ngar/baselines.hpp"
#include "ngar/delaunay.hpp"
#include "ngar/distance.hpp"
#include "ngar/frechet.hpp"
#include "ngar/ggp.hpp"
#include "ngar/neural/model.hpp"

using namespace ngar;

namespace {

GraphSequence pmlds(long steps, int c = 11) {
  Rng rng = simulation_rng(5);
  return generate_sequence(make_pmlds_config(5, 2, c, 5), steps, rng);
}

Matrix points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix p(n, 2);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
  return p;
}

}  // namespace

static void BM_Delaunay(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Matrix p = points(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(delaunay_adjacency(p));
}
BENCHMARK(BM_Delaunay)->Arg(5)->Arg(10)->Arg(20);

static void BM_GedIdentity(benchmark::State& state) {
  const auto seq = pmlds(2);
  for (auto _ : state) benchmark::DoNotOptimize(ged(seq[0], seq[1]));
}
BENCHMARK(BM_GedIdentity);

static void BM_GedOptimal(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0));
  const AttributedGraph g(points(rng, n), delaunay_adjacency(points(rng, n)));
  const AttributedGraph h(points(rng, n), delaunay_adjacency(points(rng, n)));
  const DistanceParams params{1.0, Correspondence::optimal_permutation};
  for (auto _ : state) benchmark::DoNotOptimize(ged(g, h, params));
}
BENCHMARK(BM_GedOptimal)->DenseRange(4, 8, 2);

static void BM_FrechetMean(benchmark::State& state) {
  const auto seq = pmlds(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(frechet_mean_closed_form(seq.graphs()));
}
BENCHMARK(BM_FrechetMean)->Arg(20)->Arg(18000);

static void BM_GeneratePmlds(benchmark::State& state) {
  const auto config = make_pmlds_config(5, 2, 11, 5);
  for (auto _ : state) {
    Rng rng = simulation_rng(5);
    benchmark::DoNotOptimize(generate_sequence(config, 1000, rng));
  }
}
BENCHMARK(BM_GeneratePmlds)->Unit(benchmark::kMillisecond);

static void BM_VarFit(benchmark::State& state) {
  const auto seq = pmlds(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(var_fit(seq, kDefaultWindow));
}
BENCHMARK(BM_VarFit)->Arg(2000)->Arg(18000)->Unit(benchmark::kMillisecond);

static void BM_NgarBatch(benchmark::State& state) {
  const bool backward = state.range(0) != 0;
  const auto seq = pmlds(400);
  const NgarConfig config;
  const auto model = nn::init_model<float>(config, 5, 2);
  const auto data = nn::prepare_sequence<float>(seq);
  std::vector<long> targets(static_cast<std::size_t>(config.batch_size));
  std::iota(targets.begin(), targets.end(), static_cast<long>(config.window));
  auto grads = nn::zeros_like(model.params);
  for (auto _ : state) {
    if (backward)
      benchmark::DoNotOptimize(nn::loss_and_gradient(model, data, targets, &grads));
    else
      benchmark::DoNotOptimize(nn::forward_batch(model, data, targets));
  }
  state.SetItemsProcessed(state.iterations() * config.batch_size);
}
BENCHMARK(BM_NgarBatch)->ArgName("backward")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
