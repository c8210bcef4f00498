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

// Acceptance checks. Prints one PASS / FAIL / SKIP line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fmqubos/anneal.hpp"
#include "fmqubos/binopt.hpp"
#include "fmqubos/fm.hpp"
#include "fmqubos/metrics.hpp"
#include "fmqubos/runner.hpp"
#include "fmqubos/surrogate.hpp"
#include "oracles.hpp"

using namespace fmqubos;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

std::string num(double v, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

// -- 1 ----------------------------------------------------------------------

Outcome exactness_chain() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    std::size_t models = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
        for (int rep = 0; rep < 3; ++rep) {
            const std::size_t k = 1 + static_cast<std::size_t>(rep) * 2;
            const FmModel fm = oracle::random_fm(n, k, rng);
            const HofmModel ho = oracle::random_hofm(n, k, rng);
            const QuboModel q = fm_to_qubo(fm);
            const HuboModel h = hofm_to_hubo(ho);
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
                const BinaryVector x = oracle::bits_of(code, n);
                worst = std::max(worst, std::abs(fm_predict(fm, x) - qubo_energy(q, x)));
                worst = std::max(worst, std::abs(hofm_predict(ho, x) - hubo_energy(h, x)));
            }
            models += 2;
        }
    }
    return verdict(worst <= 1e-9, std::to_string(models) + " models, max |diff| " + num(worst));
}

// -- 2 ----------------------------------------------------------------------

Outcome conversion_identities() {
    std::mt19937_64 rng(1002);
    std::size_t bad = 0;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t % 12);
        const QuboModel q = oracle::random_qubo(n, rng);
        const IsingModel is = qubo_to_ising(q);
        if (!approx_equal(ising_to_qubo(is), q, 1e-12)) ++bad;
        for (int r = 0; r < 20; ++r) {
            const BinaryVector x = oracle::random_bits(n, rng);
            SpinVector s(n);
            for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<std::int8_t>(1 - 2 * x[i]);
            worst = std::max(worst, std::abs(ising_energy(is, s) - qubo_energy(q, x)));
        }
    }
    return verdict(bad == 0 && worst <= 1e-12,
                   "roundtrip mismatches " + std::to_string(bad) + ", max energy |diff| " + num(worst));
}

// -- 3 ----------------------------------------------------------------------

Outcome reduction_soundness() {
    bool gadget_ok = true;
    for (int x = 0; x <= 1; ++x) {
        for (int y = 0; y <= 1; ++y) {
            for (int z = 0; z <= 1; ++z) {
                const int g = gadget_penalty(x, y, z);
                gadget_ok = gadget_ok && (z == x * y ? g == 0 : g >= 1);
            }
        }
    }
    std::mt19937_64 rng(1003);
    std::size_t agree = 0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 3 + static_cast<std::size_t>(t % 6);
        const HuboModel h = oracle::random_hubo(n, 4, 2 * n, rng);
        const auto best = oracle::enumerate_min(n, [&](const BinaryVector& x) { return oracle::hubo_value(h, x); });
        const ReductionResult red = reduce_hubo_to_qubo(h);
        const SolveResult s = brute_force(red.qubo);
        const BinaryVector x = red.original_part(s.best_x);
        const bool ok = std::abs(s.best_energy - best.energy) <= 1e-9 &&
                        std::abs(oracle::hubo_value(h, x) - best.energy) <= 1e-9;
        if (ok) ++agree;
    }
    return verdict(gadget_ok && agree == 50,
                   std::string("gadget ") + (gadget_ok ? "ok" : "broken") + ", argmin agreement " +
                           std::to_string(agree) + "/50");
}

// -- 4 ----------------------------------------------------------------------

Outcome gradient_check() {
    std::mt19937_64 rng(1004);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 3 + static_cast<std::size_t>(t);
        const std::size_t k = 1 + static_cast<std::size_t>(t % 4);
        FmModel m = oracle::random_fm(n, k, rng, 0.5);
        Dataset batch;
        for (int r = 0; r < 7; ++r) batch.push_back(oracle::random_bits(n, rng), std::normal_distribution<>(0, 2)(rng));
        const double beta2 = t % 3 ? 0.01 : 0.0;
        const FmGradient g = fm_gradient(m, batch, 0.0, beta2);
        std::vector<double> analytic{g.w0};
        analytic.insert(analytic.end(), g.w.begin(), g.w.end());
        analytic.insert(analytic.end(), g.v.values().begin(), g.v.values().end());
        std::vector<double*> p{&m.w0};
        for (auto& w : m.w) p.push_back(&w);
        for (auto& v : m.v.values()) p.push_back(&v);
        const double h = 1e-5;
        for (std::size_t c = 0; c < p.size(); ++c) {
            const double keep = *p[c];
            *p[c] = keep + h;
            const double up = fm_objective(m, batch, 0.0, beta2);
            *p[c] = keep - h;
            const double down = fm_objective(m, batch, 0.0, beta2);
            *p[c] = keep;
            const double fd = (up - down) / (2 * h);
            const double rel = std::abs(analytic[c] - fd) / std::max({std::abs(analytic[c]), std::abs(fd), 1e-6});
            worst = std::max(worst, rel);
        }
    }
    return verdict(worst < 1e-4, "max relative error " + num(worst));
}

// -- 5 ----------------------------------------------------------------------

Outcome solver_quality() {
    std::mt19937_64 rng(1005);
    std::size_t hits = 0;
    bool feasible = true;
    const OneHotGroups groups{{0, 1, 2}, {3, 4, 5, 6}, {7, 8}, {9, 10, 11}};
    for (int t = 0; t < 20; ++t) {
        const QuboModel q = oracle::random_qubo(15, rng);
        const auto best = oracle::enumerate_min(15, [&](const BinaryVector& x) { return oracle::qubo_value(q, x); });
        AnnealConfig a;
        a.num_reads = 5000;
        a.seed = static_cast<std::uint64_t>(t);
        const SolveResult s = solve(q, a);
        if (std::abs(s.best_energy - best.energy) <= 1e-9) ++hits;

        a.one_hot_groups = groups;
        a.num_reads = 500;
        AnnealDebug debug;
        debug.on_state = [&](std::span<const std::uint8_t> x) { feasible = feasible && satisfies_groups(x, groups); };
        const SolveResult g = solve(q, a, &debug);
        feasible = feasible && g.feasible && satisfies_groups(g.best_x, groups);
    }
    return verdict(hits >= 19 && feasible, "optimum found on " + std::to_string(hits) +
                                                   "/20, one-hot states all feasible: " + (feasible ? "yes" : "no"));
}

// -- 6, 8 -------------------------------------------------------------------

RunConfig synthetic_benchmark() {
    RunConfig c;
    c.scenario = "synthetic";
    c.seeds.clear();
    for (std::uint64_t s = 0; s < 10; ++s) c.seeds.push_back(s);
    c.n1 = {300};
    c.m = {0, 8};
    c.synthetic.n_groups = 4;
    c.synthetic.group_size = 3;
    c.synthetic.planted_orders = {1, 2, 3};
    c.n_test = 100;
    c.train.beta1 = 0.02;
    c.train.beta2 = 0.003;
    c.anneal.num_reads = 200;
    c.anneal.sweeps_per_read = 200;
    c.i_max = 10;
    c.epsilon = 1e-3;
    return c;
}

std::vector<ScenarioRow> benchmark_rows() {
    static const std::vector<ScenarioRow> rows = [] {
        std::ostringstream log;
        return run_scenario(synthetic_benchmark(), log);
    }();
    return rows;
}

std::vector<double> pearson_at(const std::vector<ScenarioRow>& rows, std::size_t m) {
    std::vector<double> out;
    for (const auto& r : rows) {
        if (r.cell.m == m && r.cell.converged) out.push_back(r.cell.pearson);
    }
    return out;
}

Outcome slack_benefit() {
    const auto rows = benchmark_rows();
    const auto p0 = pearson_at(rows, 0);
    const auto p8 = pearson_at(rows, 8);
    if (p0.size() < 2 || p8.size() < 2) return {Status::fail, "too few converged cells"};
    const double m0 = mean(p0), m8 = mean(p8);
    const double s0 = sample_std(p0), s8 = sample_std(p8);
    const double se = std::sqrt(s0 * s0 / static_cast<double>(p0.size()) + s8 * s8 / static_cast<double>(p8.size()));
    const bool ok = (m8 - m0) > se && s8 * s8 <= s0 * s0;
    return verdict(ok, "pearson m=0 " + num(m0) + "+-" + num(s0) + ", m=8 " + num(m8) + "+-" + num(s8) +
                               ", difference " + num(m8 - m0) + " vs pooled SE " + num(se));
}

Outcome nonzero_slack_fraction() {
    const auto rows = benchmark_rows();
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.cell.m >= 8 && r.cell.converged) {
            sum += static_cast<double>(r.cell.n_nonzero_slack) / static_cast<double>(r.cell.m);
            ++n;
        }
    }
    if (n == 0) return {Status::fail, "no converged cells with m >= 8"};
    const double f = sum / static_cast<double>(n);
    return verdict(f > 0.0 && f < 1.0, "nonzero-slack fraction at m=8: " + num(f));
}

// -- 7 ----------------------------------------------------------------------

Outcome degeneracy() {
    std::size_t same = 0, runs = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SyntheticSpec spec;
        spec.n_groups = 3;
        spec.group_size = 3;
        spec.seed = seed;
        const auto box = make_synthetic_blackbox(spec);
        SurrogateConfig c;
        c.seed = seed;
        c.i_max = 8;
        c.epsilon = 1e-6;
        c.anneal.num_reads = 100;
        c.anneal.sweeps_per_read = 200;
        for (bool warm : {true, false}) {
            c.warm_start = warm;
            const OptimizeResult a = fmqubo_optimize(*box, 15, c);
            const OptimizeResult b = fmqubos_optimize(*box, 15, c);
            ++runs;
            if (a.trace == b.trace && a.x == b.x && a.samples.inputs == b.samples.inputs &&
                a.samples.targets == b.samples.targets) {
                ++same;
            }
        }
    }
    return verdict(same == runs, std::to_string(same) + "/" + std::to_string(runs) + " traces identical");
}

// -- 9 ----------------------------------------------------------------------

Outcome scenario1_saturation() {
    const char* path = std::getenv("FMQUBOS_SCENARIO1_CSV");
    if (path == nullptr || *path == '\0') return {Status::skip, "set FMQUBOS_SCENARIO1_CSV to run"};
    RunConfig c;
    c.scenario = "1";
    c.data = path;
    c.n1 = {0, 5, 10, 15, 20, 25, 30, 35, 40};
    c.m = {8};
    c.train.latent_dim = 4;
    c.train.beta1 = 0.02;
    c.train.beta2 = 0.003;
    c.anneal.num_reads = 5000;
    c.anneal.sweeps_per_read = 1000;
    std::ostringstream log;
    const auto rows = run_scenario(c, log);
    std::map<double, std::vector<double>> by_n;
    for (const auto& r : rows) {
        if (r.cell.converged) by_n[r.cell.n1].push_back(r.cell.pearson);
    }
    std::vector<std::pair<double, double>> curve;
    for (const auto& [n, v] : by_n) curve.emplace_back(n, mean(v));
    if (curve.size() != c.n1.size()) return {Status::fail, "some n_extra values had no converged cases"};
    double peak = curve.front().second;
    for (const auto& p : curve) peak = std::max(peak, p.second);
    std::size_t plateau = 0;
    while (curve[plateau].second < peak - 0.05) ++plateau;
    bool monotone = true;
    for (std::size_t i = 1; i <= plateau; ++i) monotone = monotone && curve[i].second >= curve[i - 1].second;
    double at20 = 0.0, at30 = 0.0;
    for (const auto& [n, v] : curve) {
        if (n == 20) at20 = v;
        if (n == 30) at30 = v;
    }
    std::string detail = "curve";
    for (const auto& [n, v] : curve) detail += " " + num(n) + ":" + num(v, 4);
    return verdict(monotone && std::abs(at20 - at30) <= 0.05, detail);
}

// -- 10 ---------------------------------------------------------------------

Outcome determinism() {
    RunConfig c;
    c.seeds = {4, 5};
    c.n1 = {80};
    c.m = {0, 4};
    c.synthetic.n_groups = 3;
    c.synthetic.group_size = 3;
    c.n_test = 40;
    c.train.epochs = 100;
    c.anneal.num_reads = 50;
    c.anneal.sweeps_per_read = 100;
    c.i_max = 4;
    std::string csv[2];
    for (auto& out : csv) {
        std::ostringstream log, body;
        write_grid_csv(body, c, run_scenario(c, log));
        out = body.str();
    }
    return verdict(csv[0] == csv[1] && !csv[0].empty(), std::to_string(csv[0].size()) + " bytes, identical: " +
                                                               (csv[0] == csv[1] ? "yes" : "no"));
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
            {1, "exactness chain", exactness_chain},
            {2, "conversion identities", conversion_identities},
            {3, "gadget and reduction soundness", reduction_soundness},
            {4, "gradient check", gradient_check},
            {5, "solver quality", solver_quality},
            {6, "slack-variable benefit", slack_benefit},
            {7, "m=0 degeneracy", degeneracy},
            {8, "nonzero-slack statistic", nonzero_slack_fraction},
            {9, "scenario-1 saturation", scenario1_saturation},
            {10, "determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        if (o.status == Status::fail) ++failed;
        std::cout << tag << " criterion " << c.id << " (" << c.name << "): " << o.detail << " [" << std::fixed
                  << std::setprecision(1) << secs << " s]" << std::defaultfloat << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
