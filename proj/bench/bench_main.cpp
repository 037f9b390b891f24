// Serial vs OpenMP: dense products, a GD sweep, and one NN training step with its sharpness estimate.

#include <benchmark/benchmark.h>

#include <random>

#include "eoslab/dense.hpp"
#include "eoslab/parallel.hpp"
#include "eoslab/toy_nn.hpp"

using namespace eoslab;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(r, c);
    for (auto& v : m.flat()) v = g(rng);
    return m;
}

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->ArgsProduct({{64, 256, 512}, {0, 1}})->ArgNames({"n", "omp"})->Unit(benchmark::kMillisecond)->UseRealTime();

// Fig. 5 style sweep over the learning-rate multiplier on b = 3.
void BM_RunBatch(benchmark::State& state) {
    std::vector<RunConfig> configs;
    for (int i = 0; i < 16; ++i) {
        RunConfig c;
        c.spec = Objective::bad(3);
        c.x0 = 6;
        c.y0 = 1;
        c.learning_rate = (1.0 + 0.1 * i) / (37.0 * 1296.0);
        c.max_iters = 200'000;
        configs.push_back(c);
    }
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(configs, exec_of(state)));
}
BENCHMARK(BM_RunBatch)->Args({16, 0})->Args({16, 1})->ArgNames({"runs", "omp"})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_NNEpoch(benchmark::State& state) {
    NetworkConfig c;
    c.N0 = 100;
    c.N1 = static_cast<std::size_t>(state.range(0));
    c.N2 = 10;
    c.parallel_matmul = state.range(1) != 0;
    const Dataset d = synthetic_dataset(512, c.N0, c.N2, 3);
    TrainOptions opt;
    opt.h = 1e-3;
    opt.epochs = 1;
    opt.record_stride = 1;
    opt.lanczos_iters = 10;
    for (auto _ : state) {
        NetworkState st = init_network(c);
        benchmark::DoNotOptimize(train_full_batch(c, st, d, opt));
    }
}
BENCHMARK(BM_NNEpoch)->ArgsProduct({{64, 256}, {0, 1}})->ArgNames({"hidden", "omp"})->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
