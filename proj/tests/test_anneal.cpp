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

#include <catch_amalgamated.hpp>

#include <random>

#include "fmqubos/anneal.hpp"
#include "fmqubos/errors.hpp"
#include "oracles.hpp"

using namespace fmqubos;
using Catch::Matchers::WithinAbs;

namespace {

AnnealConfig quick(std::uint64_t seed = 1) {
    AnnealConfig cfg;
    cfg.num_reads = 100;
    cfg.sweeps_per_read = 200;
    cfg.seed = seed;
    return cfg;
}

bool one_hot_ok(const BinaryVector& x, const OneHotGroups& groups) {
    for (const auto& g : groups) {
        int hot = 0;
        for (auto i : g) hot += x[i];
        if (hot != 1) return false;
    }
    return true;
}

QuboModel uniform_qubo(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    QuboModel q(n);
    for (std::size_t i = 0; i < n; ++i) {
        q.add_linear(i, c(rng));
        for (std::size_t j = i + 1; j < n; ++j) q.add_quadratic(i, j, c(rng));
    }
    return q;
}

}  // namespace

TEST_CASE("solve: separable model", "[anneal]") {
    QuboModel q(6);
    for (std::size_t i = 0; i < 6; ++i) q.add_linear(i, 1.0);
    const SolveResult r = solve(q, quick());
    CHECK(r.best_x == BinaryVector(6, 0));
    CHECK(r.best_energy == 0.0);
    CHECK(r.feasible);
}

TEST_CASE("solve: empty model returns a feasible state", "[anneal]") {
    const SolveResult r = solve(QuboModel(0), quick());
    CHECK(r.best_x.empty());
    CHECK(r.best_energy == 0.0);

    AnnealConfig cfg = quick();
    cfg.one_hot_groups = {{0, 1, 2}};
    const SolveResult g = solve(QuboModel(3), cfg);
    CHECK(one_hot_ok(g.best_x, cfg.one_hot_groups));
}

TEST_CASE("solve agrees with brute force on random n=15 models", "[anneal][property]") {
    std::mt19937_64 rng(41);
    int hits = 0;
    for (int t = 0; t < 5; ++t) {
        const QuboModel q = uniform_qubo(15, rng);
        const auto oracle_min = oracle::enumerate_min(15, [&](const BinaryVector& x) { return oracle::qubo_value(q, x); });
        AnnealConfig cfg = quick(static_cast<std::uint64_t>(t));
        cfg.num_reads = 300;
        const SolveResult r = solve(q, cfg);
        REQUIRE(r.best_energy >= oracle_min.energy - 1e-9);
        REQUIRE_THAT(r.best_energy, WithinAbs(oracle::qubo_value(q, r.best_x), 1e-12));
        if (r.best_energy <= oracle_min.energy + 1e-9) ++hits;
    }
    CHECK(hits >= 4);
}

TEST_CASE("one-hot groups hold in every visited state", "[anneal][property]") {
    std::mt19937_64 rng(43);
    const QuboModel q = uniform_qubo(18, rng);
    AnnealConfig cfg = quick();
    cfg.num_reads = 20;
    cfg.sweeps_per_read = 50;
    cfg.one_hot_groups = {{0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11, 12, 13, 14, 15}};
    std::size_t visited = 0;
    bool all_ok = true;
    AnnealDebug debug;
    debug.check_energy = true;
    debug.on_state = [&](std::span<const std::uint8_t> x) {
        ++visited;
        all_ok = all_ok && one_hot_ok(BinaryVector(x.begin(), x.end()), cfg.one_hot_groups);
    };
    const SolveResult r = solve(q, cfg, &debug);
    CHECK(visited > 20);
    CHECK(all_ok);
    CHECK(r.feasible);
    CHECK(one_hot_ok(r.best_x, cfg.one_hot_groups));

    const auto exact = oracle::enumerate_min(18, cfg.one_hot_groups,
                                             [&](const BinaryVector& x) { return oracle::qubo_value(q, x); });
    CHECK(r.best_energy >= exact.energy - 1e-9);
}

TEST_CASE("debug path, parallel and serial solvers agree", "[anneal]") {
    std::mt19937_64 rng(47);
    const QuboModel q = uniform_qubo(12, rng);
    AnnealConfig cfg = quick(9);
    cfg.keep_read_energies = true;
    cfg.one_hot_groups = {{0, 1, 2}, {5, 6}};
    const SolveResult par = solve(q, cfg);
    const SolveResult ser = solve_serial(q, cfg);
    AnnealDebug debug;
    debug.check_energy = true;
    const SolveResult dbg = solve(q, cfg, &debug);
    for (const SolveResult* other : {&ser, &dbg}) {
        CHECK(par.best_x == other->best_x);
        CHECK(par.best_energy == other->best_energy);
        CHECK(par.best_read == other->best_read);
        CHECK(par.read_energies == other->read_energies);
    }
    REQUIRE(par.read_energies.size() == cfg.num_reads);
    CHECK(par.read_energies[par.best_read] == par.best_energy);
    for (std::size_t r = 0; r < par.best_read; ++r) CHECK(par.read_energies[r] > par.best_energy);
}

TEST_CASE("solve is deterministic in the seed", "[anneal]") {
    std::mt19937_64 rng(53);
    const QuboModel q = uniform_qubo(20, rng);
    AnnealConfig cfg = quick(5);
    cfg.keep_read_energies = true;
    const SolveResult a = solve(q, cfg);
    const SolveResult b = solve(q, cfg);
    CHECK(a.best_x == b.best_x);
    CHECK(a.read_energies == b.read_energies);
    cfg.seed = 6;
    CHECK(solve(q, cfg).read_energies != a.read_energies);
}

TEST_CASE("solve validates its configuration", "[anneal]") {
    QuboModel q(4);
    AnnealConfig cfg = quick();
    cfg.one_hot_groups = {{0, 1}, {1, 2}};
    CHECK_THROWS_AS(solve(q, cfg), ValidationError);
    cfg.one_hot_groups = {{0, 4}};
    CHECK_THROWS_AS(solve(q, cfg), ValidationError);
    cfg.one_hot_groups = {{}};
    CHECK_THROWS_AS(solve(q, cfg), ValidationError);
    cfg.one_hot_groups.clear();
    cfg.num_reads = 0;
    CHECK_THROWS_AS(solve(q, cfg), ValidationError);
    cfg.num_reads = 1;
    cfg.t_initial = 1.0;
    cfg.t_final = 2.0;
    CHECK_THROWS_AS(solve(q, cfg), ValidationError);
}

TEST_CASE("temperatures resolve from the model", "[anneal]") {
    QuboModel q(3);
    q.add_linear(0, 4.0);
    q.add_quadratic(1, 2, -2.0);
    AnnealConfig cfg = quick();
    const TemperatureRange t = resolve_temperatures(q, cfg);
    CHECK(t.initial > 0.0);
    CHECK(t.initial <= 4.0);
    CHECK_THAT(t.final, WithinAbs(1e-3 * t.initial, 1e-15));
    cfg.t_initial = 10.0;
    cfg.t_final = 0.5;
    const TemperatureRange fixed = resolve_temperatures(q, cfg);
    CHECK(fixed.initial == 10.0);
    CHECK(fixed.final == 0.5);
    CHECK(resolve_temperatures(QuboModel(3), quick()).initial == 1.0);
}

TEST_CASE("brute_force hand cases", "[anneal]") {
    const SolveResult zero = brute_force(QuboModel(3));
    CHECK(zero.best_energy == 0.0);
    CHECK(zero.best_x == BinaryVector{0, 0, 0});

    QuboModel pair(2);
    pair.add_quadratic(0, 1, -1.0);
    const SolveResult p = brute_force(pair);
    CHECK(p.best_x == BinaryVector{1, 1});
    CHECK(p.best_energy == -1.0);

    QuboModel grouped(2);
    grouped.add_linear(0, 5.0);
    grouped.add_linear(1, 1.0);
    const SolveResult g = brute_force(grouped, {{0, 1}});
    CHECK(g.best_x == BinaryVector{0, 1});
    CHECK(g.best_energy == 1.0);

    CHECK_THROWS_AS(brute_force(QuboModel(kBruteForceMaxVars + 1)), CapacityError);
}

TEST_CASE("brute_force ties go to the lexicographically smallest string", "[anneal]") {
    QuboModel q(3);
    q.add_linear(0, -1.0);
    q.add_linear(2, -1.0);
    q.add_quadratic(0, 2, 1.0);
    const SolveResult r = brute_force(q);
    CHECK(r.best_energy == -1.0);
    CHECK(r.best_x == BinaryVector{0, 0, 1});
    CHECK(brute_force_serial(q).best_x == r.best_x);
}

TEST_CASE("brute_force matches enumeration and its serial reference", "[anneal][property]") {
    std::mt19937_64 rng(59);
    for (int t = 0; t < 12; ++t) {
        const std::size_t n = 4 + static_cast<std::size_t>(t);
        const QuboModel q = oracle::random_qubo(n, rng);
        OneHotGroups groups;
        if (t % 2) groups = {{0, 1, 2}, {3}};
        const auto exact = oracle::enumerate_min(n, groups, [&](const BinaryVector& x) { return oracle::qubo_value(q, x); });
        const SolveResult par = brute_force(q, groups);
        const SolveResult ser = brute_force_serial(q, groups);
        REQUIRE_THAT(par.best_energy, WithinAbs(exact.energy, 1e-9));
        REQUIRE(par.best_x == ser.best_x);
        REQUIRE(par.best_energy == ser.best_energy);
        REQUIRE(one_hot_ok(par.best_x, groups));
    }
}
