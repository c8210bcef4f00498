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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <omp.h>

#include "fmqubos/anneal.hpp"
#include "fmqubos/errors.hpp"
#include "anneal_kernel.hpp"

namespace fmqubos {

namespace detail {

DenseQubo::DenseQubo(const QuboModel& model)
        : n(model.num_variables()),
          constant(model.constant()),
          linear(model.linear_terms()),
          coupling(n * n, 0.0) {
    for (const auto& [key, bias] : model.quadratic_terms()) {
        coupling[key.first * n + key.second] = bias;
        coupling[key.second * n + key.first] = bias;
    }
}

double DenseQubo::energy(std::span<const std::uint8_t> x) const {
    double e = constant;
    for (std::size_t i = 0; i < n; ++i) {
        if (!x[i]) continue;
        e += linear[i];
        const double* row = &coupling[i * n];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (x[j]) e += row[j];
        }
    }
    return e;
}

void DenseQubo::fields(std::span<const std::uint8_t> x, std::span<double> out) const {
    for (std::size_t i = 0; i < n; ++i) out[i] = linear[i];
    for (std::size_t j = 0; j < n; ++j) {
        if (!x[j]) continue;
        const double* row = &coupling[j * n];
        for (std::size_t i = 0; i < n; ++i) out[i] += row[i];
    }
}

std::uint64_t read_seed(std::uint64_t master, std::size_t read) {
    return derive_seed(master, "anneal-read", {read});
}

void random_feasible(const AnnealPlan& plan, std::size_t n, Rng& rng, std::span<std::uint8_t> x) {
    std::fill(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n), std::uint8_t{0});
    for (const auto& g : plan.groups) {
        std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
        x[g[pick(rng)]] = 1;
    }
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i : plan.free) x[i] = coin(rng) ? 1 : 0;
}

void check_config(const QuboModel& model, const AnnealConfig& config) {
    if (config.num_reads == 0) throw ValidationError("num_reads must be >= 1");
    if (config.sweeps_per_read == 0) throw ValidationError("sweeps_per_read must be >= 1");
    if (config.t_initial && !(*config.t_initial > 0.0)) throw ValidationError("t_initial must be > 0");
    if (config.t_final && !(*config.t_final > 0.0)) throw ValidationError("t_final must be > 0");
    validate_groups(config.one_hot_groups, model.num_variables());
}

namespace {

/// Largest |dE| over 100 random single moves from random feasible states.
double estimate_t_initial(const DenseQubo& dense, const AnnealPlan& plan, std::uint64_t seed) {
    if (dense.n == 0) return 1.0;
    Rng rng(derive_seed(seed, "anneal-t-initial"));
    std::vector<std::uint8_t> x(dense.n);
    std::vector<double> f(dense.n);
    std::vector<std::size_t> movable_groups;
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        if (plan.groups[g].size() > 1) movable_groups.push_back(g);
    }
    const std::size_t n_moves = plan.free.size() + movable_groups.size();
    if (n_moves == 0) return 1.0;
    std::uniform_int_distribution<std::size_t> pick_move(0, n_moves - 1);
    double biggest = 0.0;
    for (int s = 0; s < 100; ++s) {
        random_feasible(plan, dense.n, rng, x);
        dense.fields(x, f);
        const std::size_t m = pick_move(rng);
        double d;
        if (m < plan.free.size()) {
            const std::size_t i = plan.free[m];
            d = x[i] ? -f[i] : f[i];
        } else {
            const auto& g = plan.groups[movable_groups[m - plan.free.size()]];
            const std::size_t hot = *std::find_if(g.begin(), g.end(), [&](std::size_t i) { return x[i]; });
            std::uniform_int_distribution<std::size_t> pick(0, g.size() - 2);
            std::size_t target = g[pick(rng)];
            if (target == hot) target = g.back();
            d = -f[hot] + f[target] - dense.q(hot, target);
        }
        biggest = std::max(biggest, std::abs(d));
    }
    return biggest > 0.0 ? biggest : 1.0;
}

TemperatureRange resolve(const DenseQubo& dense, const AnnealPlan& plan, const AnnealConfig& config) {
    double t0 = config.t_initial ? *config.t_initial : estimate_t_initial(dense, plan, config.seed);
    double t1 = config.t_final ? *config.t_final : 1e-3 * t0;
    if (!(t0 > t1)) {
        throw ValidationError("t_initial (" + std::to_string(t0) + ") must exceed t_final (" +
                              std::to_string(t1) + ")");
    }
    return {t0, t1};
}

}  // namespace

AnnealPlan make_plan(const QuboModel& model, const DenseQubo& dense, const AnnealConfig& config) {
    check_config(model, config);
    AnnealPlan plan;
    plan.groups = config.one_hot_groups;
    std::vector<std::uint8_t> grouped(dense.n, 0);
    for (const auto& g : plan.groups) {
        for (std::size_t i : g) grouped[i] = 1;
    }
    for (std::size_t i = 0; i < dense.n; ++i) {
        if (!grouped[i]) plan.free.push_back(i);
    }
    const TemperatureRange t = resolve(dense, plan, config);
    const std::size_t sweeps = config.sweeps_per_read;
    plan.betas.resize(sweeps);
    for (std::size_t s = 0; s < sweeps; ++s) {
        const double frac = sweeps == 1 ? 1.0 : static_cast<double>(s) / static_cast<double>(sweeps - 1);
        plan.betas[s] = 1.0 / (t.initial * std::pow(t.final / t.initial, frac));
    }
    return plan;
}

double run_read(const DenseQubo& dense, const AnnealPlan& plan, std::uint64_t seed,
                std::span<std::uint8_t> x, const AnnealDebug* debug) {
    const std::size_t n = dense.n;
    Rng rng(seed);
    random_feasible(plan, n, rng, x);
    std::vector<double> f(n);
    dense.fields(x, f);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    double energy = 0.0;
    const bool checking = debug && debug->check_energy;
    if (checking) energy = dense.energy(x);
    if (debug && debug->on_state) debug->on_state(x);

    auto after_move = [&](double delta) {
        if (!debug) return;
        if (checking) {
            energy += delta;
            const double exact = dense.energy(x);
            if (std::abs(exact - energy) > 1e-9 * std::max(1.0, std::abs(exact))) {
                throw std::logic_error("incremental energy drifted from recomputation");
            }
        }
        if (debug->on_state) debug->on_state(x);
    };

    auto accept = [&](double delta, double beta) {
        return delta <= 0.0 || uniform(rng) < std::exp(-delta * beta);
    };

    auto toggle = [&](std::size_t i) {
        const double sign = x[i] ? -1.0 : 1.0;
        x[i] ^= 1U;
        const double* row = &dense.coupling[i * n];
        for (std::size_t j = 0; j < n; ++j) f[j] += sign * row[j];
    };

    std::vector<std::size_t> hot(plan.groups.size());
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        for (std::size_t i : plan.groups[g]) {
            if (x[i]) hot[g] = i;
        }
    }

    for (double beta : plan.betas) {
        for (std::size_t i : plan.free) {
            const double delta = x[i] ? -f[i] : f[i];
            if (accept(delta, beta)) {
                toggle(i);
                after_move(delta);
            }
        }
        for (std::size_t g = 0; g < plan.groups.size(); ++g) {
            for (std::size_t target : plan.groups[g]) {
                const std::size_t from = hot[g];
                if (target == from) continue;
                const double delta = -f[from] + f[target] - dense.q(from, target);
                if (accept(delta, beta)) {
                    toggle(from);
                    toggle(target);
                    hot[g] = target;
                    after_move(delta);
                }
            }
        }
    }
    return dense.energy(x);
}

bool lex_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

using namespace detail;

void validate_groups(const OneHotGroups& groups, std::size_t n_vars) {
    std::vector<std::uint8_t> seen(n_vars, 0);
    for (const auto& g : groups) {
        if (g.empty()) throw ValidationError("empty one-hot group");
        for (std::size_t i : g) {
            if (i >= n_vars) {
                throw ValidationError("one-hot group index " + std::to_string(i) + " out of range");
            }
            if (seen[i]) throw ValidationError("one-hot groups overlap at index " + std::to_string(i));
            seen[i] = 1;
        }
    }
}

bool satisfies_groups(std::span<const std::uint8_t> x, const OneHotGroups& groups) {
    for (const auto& g : groups) {
        std::size_t ones = 0;
        for (std::size_t i : g) ones += x[i];
        if (ones != 1) return false;
    }
    return true;
}

TemperatureRange resolve_temperatures(const QuboModel& model, const AnnealConfig& config) {
    const DenseQubo dense(model);
    const AnnealPlan plan = make_plan(model, dense, config);
    const double t0 = 1.0 / plan.betas.front();
    const double t1 = 1.0 / plan.betas.back();
    return {t0, t1};
}

SolveResult solve(const QuboModel& model, const AnnealConfig& config, const AnnealDebug* debug) {
    // Hooks are not thread-safe; instrumented runs take the serial path.
    if (debug) return solve_sequential(model, config, debug);

    const DenseQubo dense(model);
    const AnnealPlan plan = make_plan(model, dense, config);
    const std::size_t n = dense.n;
    const auto reads = static_cast<std::ptrdiff_t>(config.num_reads);

    std::vector<double> energies(config.keep_read_energies ? config.num_reads : 0);
    double best_energy = std::numeric_limits<double>::infinity();
    std::size_t best_read = config.num_reads;
    BinaryVector best_x(n);

#pragma omp parallel
    {
        BinaryVector x(n);
        double local_energy = std::numeric_limits<double>::infinity();
        std::size_t local_read = config.num_reads;
        BinaryVector local_x(n);

#pragma omp for schedule(static)
        for (std::ptrdiff_t r = 0; r < reads; ++r) {
            const auto read = static_cast<std::size_t>(r);
            const double e = run_read(dense, plan, read_seed(config.seed, read), x, nullptr);
            if (!energies.empty()) energies[read] = e;
            if (e < local_energy || (e == local_energy && read < local_read)) {
                local_energy = e;
                local_read = read;
                local_x = x;
            }
        }

#pragma omp critical(fmqubos_anneal_reduce)
        {
            if (local_energy < best_energy ||
                (local_energy == best_energy && local_read < best_read)) {
                best_energy = local_energy;
                best_read = local_read;
                best_x = local_x;
            }
        }
    }

    SolveResult result;
    result.best_x = std::move(best_x);
    result.best_read = best_read;
    result.best_energy = model.energy(result.best_x);
    result.read_energies = std::move(energies);
    result.feasible = satisfies_groups(result.best_x, config.one_hot_groups);
    return result;
}

// -- brute force ------------------------------------------------------------

namespace {

struct Enumeration {
    std::vector<std::size_t> free;
    OneHotGroups groups;
    std::uint64_t group_combos = 1;
};

Enumeration make_enumeration(const QuboModel& model, const OneHotGroups& groups) {
    const std::size_t n = model.num_variables();
    if (n > kBruteForceMaxVars) {
        throw CapacityError("brute force limited to " + std::to_string(kBruteForceMaxVars) +
                            " variables, model has " + std::to_string(n));
    }
    validate_groups(groups, n);
    Enumeration e;
    e.groups = groups;
    std::vector<std::uint8_t> grouped(n, 0);
    for (const auto& g : groups) {
        e.group_combos *= g.size();
        for (std::size_t i : g) grouped[i] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!grouped[i]) e.free.push_back(i);
    }
    return e;
}

void place_groups(const Enumeration& e, std::uint64_t combo, std::span<std::uint8_t> x) {
    for (const auto& g : e.groups) {
        for (std::size_t i : g) x[i] = 0;
        x[g[combo % g.size()]] = 1;
        combo /= g.size();
    }
}

struct Candidate {
    double energy = std::numeric_limits<double>::infinity();
    BinaryVector x;

    void offer(std::span<const std::uint8_t> state, double exact) {
        if (exact < energy || (exact == energy && lex_less(state, x))) {
            energy = exact;
            x.assign(state.begin(), state.end());
        }
    }
};

}  // namespace

SolveResult brute_force(const QuboModel& model, const OneHotGroups& one_hot_groups) {
    const Enumeration e = make_enumeration(model, one_hot_groups);
    const DenseQubo dense(model);
    const std::size_t n = dense.n;

    // Split the free bits into a prefix enumerated across tasks and a suffix
    // walked in Gray-code order inside each task.
    const std::size_t n_free = e.free.size();
    const std::size_t prefix_bits = std::min<std::size_t>(n_free, 6);
    const std::size_t suffix_bits = n_free - prefix_bits;
    const std::uint64_t prefixes = std::uint64_t{1} << prefix_bits;
    const auto tasks = static_cast<std::ptrdiff_t>(e.group_combos * prefixes);

    Candidate best;
#pragma omp parallel
    {
        Candidate local;
        BinaryVector x(n);
        std::vector<double> f(n);

#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t t = 0; t < tasks; ++t) {
            const auto task = static_cast<std::uint64_t>(t);
            place_groups(e, task / prefixes, x);
            const std::uint64_t prefix = task % prefixes;
            for (std::size_t b = 0; b < n_free; ++b) {
                x[e.free[b]] = b >= suffix_bits ? static_cast<std::uint8_t>((prefix >> (b - suffix_bits)) & 1U) : 0;
            }
            dense.fields(x, f);
            double energy = dense.energy(x);
            // Incremental energies carry rounding; confirm near-ties exactly.
            auto consider = [&] {
                const double slack = 1e-9 * std::max(1.0, std::abs(energy));
                if (energy <= local.energy + slack) local.offer(x, model.energy(x));
            };
            consider();
            const std::uint64_t steps = std::uint64_t{1} << suffix_bits;
            for (std::uint64_t g = 1; g < steps; ++g) {
                const auto bit = static_cast<std::size_t>(std::countr_zero(g));
                const std::size_t i = e.free[bit];
                const double sign = x[i] ? -1.0 : 1.0;
                energy += sign * f[i];
                x[i] ^= 1U;
                const double* row = &dense.coupling[i * n];
                for (std::size_t j = 0; j < n; ++j) f[j] += sign * row[j];
                consider();
            }
        }

#pragma omp critical(fmqubos_brute_reduce)
        {
            if (!local.x.empty() || n == 0) best.offer(local.x, local.energy);
        }
    }

    SolveResult result;
    result.best_x = n == 0 ? BinaryVector{} : best.x;
    result.best_energy = model.energy(result.best_x);
    result.feasible = satisfies_groups(result.best_x, one_hot_groups);
    return result;
}

}  // namespace fmqubos
