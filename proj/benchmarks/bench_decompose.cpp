#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "tdn/decompose.hpp"
#include "tdn/formats.hpp"
#include "tdn/noise_lab.hpp"
#include "tdn/rng.hpp"
#include "tdn/tensor.hpp"

namespace {

tdn::DenseTensor noisy_cube(std::int64_t m, int d, double ratio, std::uint64_t seed) {
    std::vector<std::int64_t> shape(static_cast<std::size_t>(d), m);
    const auto cp = tdn::random_cp(shape, 1, tdn::split_seed(seed, 0));
    const auto truth = tdn::cp_to_dense(cp);
    tdn::NoiseSpec spec;
    spec.ratio = ratio;
    spec.seed = tdn::split_seed(seed, 1);
    return tdn::add_noise(truth, spec).first;
}

void bm_als_cp(benchmark::State& state) {
    const auto m = state.range(0);
    const int rank = static_cast<int>(state.range(1));
    const auto t = noisy_cube(m, 3, 0.1, 11);
    tdn::AlsOptions opts;
    opts.seed = 5;
    for (auto _ : state) {
        auto result = tdn::als_cp(t, rank, opts);
        benchmark::DoNotOptimize(result.second.residual);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.data.size()));
}

void bm_hosvd(benchmark::State& state) {
    const auto m = state.range(0);
    const int rank = static_cast<int>(state.range(1));
    const auto t = noisy_cube(m, 4, 0.1, 13);
    for (auto _ : state) {
        auto result = tdn::hosvd(t, rank);
        benchmark::DoNotOptimize(result.second.residual);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.data.size()));
}

void bm_tt_svd(benchmark::State& state) {
    const auto m = state.range(0);
    const int rank = static_cast<int>(state.range(1));
    const auto t = noisy_cube(m, 6, 0.1, 17);
    for (auto _ : state) {
        auto result = tdn::tt_svd(t, rank);
        benchmark::DoNotOptimize(result.second.residual);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.data.size()));
}

void bm_multigrid(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto t = noisy_cube(2, d, 5.0, 19);
    tdn::AlsOptions opts;
    opts.seed = 7;
    std::vector<int> schedule;
    for (int dl = d / 4; dl <= d; dl *= 2) schedule.push_back(dl);
    for (auto _ : state) {
        auto result = tdn::multigrid_als_rank1(t, schedule, opts);
        benchmark::DoNotOptimize(result.second.residual);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.data.size()));
}

}  // namespace

BENCHMARK(bm_als_cp)->Args({16, 1})->Args({16, 4})->Args({32, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_hosvd)->Args({8, 2})->Args({8, 4})->Args({16, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_tt_svd)->Args({4, 2})->Args({4, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_multigrid)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
