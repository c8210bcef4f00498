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

#pragma once

// Kernels shared by the OpenMP solver and its serial reference.

#include <cstdint>
#include <span>
#include <vector>

#include "fmqubos/anneal.hpp"
#include "fmqubos/seed.hpp"

namespace fmqubos::detail {

/// Dense symmetric coupling matrix with zero diagonal plus linear terms.
struct DenseQubo {
    std::size_t n = 0;
    double constant = 0.0;
    std::vector<double> linear;
    std::vector<double> coupling;  // n * n, row-major

    explicit DenseQubo(const QuboModel& model);

    double q(std::size_t i, std::size_t j) const { return coupling[i * n + j]; }
    double energy(std::span<const std::uint8_t> x) const;
    /// linear_i + sum_j Q_ij x_j
    void fields(std::span<const std::uint8_t> x, std::span<double> out) const;
};

struct AnnealPlan {
    std::vector<std::size_t> free;
    OneHotGroups groups;
    std::vector<double> betas;  // inverse temperature per sweep
};

AnnealPlan make_plan(const QuboModel& model, const DenseQubo& dense, const AnnealConfig& config);

std::uint64_t read_seed(std::uint64_t master, std::size_t read);

void random_feasible(const AnnealPlan& plan, std::size_t n, Rng& rng, std::span<std::uint8_t> x);

/// One annealing chain. Leaves the final state in x and returns its energy,
/// recomputed from scratch.
double run_read(const DenseQubo& dense, const AnnealPlan& plan, std::uint64_t seed,
                std::span<std::uint8_t> x, const AnnealDebug* debug);

/// Reads one after another; used by solve_serial and instrumented solves.
SolveResult solve_sequential(const QuboModel& model, const AnnealConfig& config,
                            const AnnealDebug* debug);

void check_config(const QuboModel& model, const AnnealConfig& config);

/// Lexicographic order on bit strings.
bool lex_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace fmqubos::detail
