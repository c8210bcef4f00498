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

// Serial reference implementations, kept for cross-checking the parallel
// kernels in anneal.cpp.

#include <limits>

#include "fmqubos/anneal.hpp"
#include "fmqubos/errors.hpp"
#include "anneal_kernel.hpp"

namespace fmqubos {

using namespace detail;

SolveResult detail::solve_sequential(const QuboModel& model, const AnnealConfig& config,
                                     const AnnealDebug* debug) {
    const DenseQubo dense(model);
    const AnnealPlan plan = make_plan(model, dense, config);
    SolveResult result;
    BinaryVector x(dense.n);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < config.num_reads; ++r) {
        const double e = run_read(dense, plan, read_seed(config.seed, r), x, debug);
        if (config.keep_read_energies) result.read_energies.push_back(e);
        if (e < best) {
            best = e;
            result.best_x = x;
            result.best_read = r;
        }
    }
    result.best_energy = model.energy(result.best_x);
    result.feasible = satisfies_groups(result.best_x, config.one_hot_groups);
    return result;
}

SolveResult solve_serial(const QuboModel& model, const AnnealConfig& config) {
    return solve_sequential(model, config, nullptr);
}

SolveResult brute_force_serial(const QuboModel& model, const OneHotGroups& one_hot_groups) {
    const std::size_t n = model.num_variables();
    if (n > kBruteForceMaxVars) throw CapacityError("brute force limited to 25 variables");
    validate_groups(one_hot_groups, n);

    SolveResult result;
    result.best_energy = std::numeric_limits<double>::infinity();
    BinaryVector x(n);
    // Counting upward with x[0] as the most significant bit visits states in
    // lexicographic order, so strict < keeps the smallest tied string.
    const std::uint64_t states = std::uint64_t{1} << n;
    for (std::uint64_t s = 0; s < states; ++s) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((s >> (n - 1 - i)) & 1U);
        if (!satisfies_groups(x, one_hot_groups)) continue;
        const double e = model.energy(x);
        if (e < result.best_energy) {
            result.best_energy = e;
            result.best_x = x;
        }
    }
    result.feasible = true;
    return result;
}

}  // namespace fmqubos
