// Copyright 2026 The fmqubos Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fmqubos/anneal.hpp"
#include "fmqubos/fm.hpp"

using namespace fmqubos;

namespace {

QuboModel random_qubo(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    QuboModel q(n);
    for (std::size_t i = 0; i < n; ++i) {
        q.add_linear(i, coef(rng));
        for (std::size_t j = i + 1; j < n; ++j) q.add_quadratic(i, j, coef(rng));
    }
    return q;
}

AnnealConfig anneal_config(std::size_t reads) {
    AnnealConfig a;
    a.num_reads = reads;
    a.sweeps_per_read = 200;
    a.seed = 1;
    return a;
}

void BM_Solve(benchmark::State& state) {
    const QuboModel q = random_qubo(static_cast<std::size_t>(state.range(0)), 7);
    const AnnealConfig a = anneal_config(static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(solve(q, a).best_energy);
}

void BM_SolveSerial(benchmark::State& state) {
    const QuboModel q = random_qubo(static_cast<std::size_t>(state.range(0)), 7);
    const AnnealConfig a = anneal_config(static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_serial(q, a).best_energy);
}

void BM_BruteForce(benchmark::State& state) {
    const QuboModel q = random_qubo(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) benchmark::DoNotOptimize(brute_force(q).best_energy);
}

void BM_BruteForceSerial(benchmark::State& state) {
    const QuboModel q = random_qubo(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_serial(q).best_energy);
}

struct PredictFixture {
    FmModel model;
    std::vector<BinaryVector> inputs;

    explicit PredictFixture(std::size_t rows) {
        TrainConfig cfg;
        cfg.latent_dim = 8;
        cfg.init_scale = 0.1;
        model = fm_init(88, cfg);
        std::mt19937_64 rng(9);
        std::bernoulli_distribution bit(0.1);
        inputs.resize(rows, BinaryVector(88));
        for (auto& x : inputs) {
            for (auto& b : x) b = bit(rng) ? 1 : 0;
        }
    }
};

void BM_PredictBatch(benchmark::State& state) {
    const PredictFixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fm_predict_batch(f.model, f.inputs));
}

void BM_PredictBatchSerial(benchmark::State& state) {
    const PredictFixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fm_predict_batch_serial(f.model, f.inputs));
}

}  // namespace

BENCHMARK(BM_Solve)->Args({16, 256})->Args({64, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveSerial)->Args({16, 256})->Args({64, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForce)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceSerial)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictBatch)->Arg(1024)->Arg(16384)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PredictBatchSerial)->Arg(1024)->Arg(16384)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
