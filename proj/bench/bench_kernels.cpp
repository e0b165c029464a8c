#include "pframe/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace pframe::kernels;

std::vector<double> random_coords(std::size_t n, std::size_t dim, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    std::vector<double> out(n * dim);
    for (auto& x : out)
        x = g(gen);
    return out;
}

constexpr std::size_t kDim = 3;

void BM_SecondMomentSerial(benchmark::State& state)
{
    const auto c = random_coords(state.range(0), kDim, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(second_moment_serial({c, kDim}, {}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SecondMomentParallel(benchmark::State& state)
{
    const auto c = random_coords(state.range(0), kDim, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(second_moment_parallel({c, kDim}, {}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CostMatrixSerial(benchmark::State& state)
{
    const auto a = random_coords(state.range(0), kDim, 2);
    const auto b = random_coords(state.range(0), kDim, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(cost_matrix_serial({a, kDim}, {b, kDim}));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_CostMatrixParallel(benchmark::State& state)
{
    const auto a = random_coords(state.range(0), kDim, 2);
    const auto b = random_coords(state.range(0), kDim, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(cost_matrix_parallel({a, kDim}, {b, kDim}));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_CellIndicesSerial(benchmark::State& state)
{
    const auto c = random_coords(state.range(0), kDim, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(cell_indices_serial({c, kDim}, 0.01));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CellIndicesParallel(benchmark::State& state)
{
    const auto c = random_coords(state.range(0), kDim, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(cell_indices_parallel({c, kDim}, 0.01));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_SecondMomentSerial)->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->UseRealTime();
BENCHMARK(BM_SecondMomentParallel)->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->UseRealTime();
BENCHMARK(BM_CostMatrixSerial)->RangeMultiplier(4)->Range(128, 2048)->UseRealTime();
BENCHMARK(BM_CostMatrixParallel)->RangeMultiplier(4)->Range(128, 2048)->UseRealTime();
BENCHMARK(BM_CellIndicesSerial)->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->UseRealTime();
BENCHMARK(BM_CellIndicesParallel)->RangeMultiplier(8)->Range(1 << 12, 1 << 21)->UseRealTime();

BENCHMARK_MAIN();
