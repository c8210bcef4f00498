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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fmqubos/binopt.hpp"

namespace fmqubos {

struct AnnealConfig {
    std::size_t num_reads = 5000;
    std::size_t sweeps_per_read = 1000;
    /// Unset: max |dE| over 100 sampled single moves.
    std::optional<double> t_initial;
    /// Unset: 1e-3 * t_initial.
    std::optional<double> t_final;
    std::uint64_t seed = 0;
    /// Disjoint index sets, each held at exactly one hot bit by the move set.
    OneHotGroups one_hot_groups;
    bool keep_read_energies = false;
};

struct SolveResult {
    BinaryVector best_x;
    double best_energy = 0.0;
    /// Final energy of every read, in read order, when requested.
    std::vector<double> read_energies;
    bool feasible = true;
    /// Index of the first read that reached best_energy.
    std::size_t best_read = 0;
};

/// Instrumentation for tests. When any hook is set the solver runs serially.
struct AnnealDebug {
    /// Compare the running energy against a full recomputation after every
    /// accepted move; throws std::logic_error on drift above 1e-9.
    bool check_energy = false;
    /// Called with the initial state of each read and after every accepted move.
    std::function<void(std::span<const std::uint8_t>)> on_state;
};

/// Restart-based simulated annealing. Each read starts from a random
/// feasible state and runs `sweeps_per_read` Metropolis sweeps on a
/// geometric temperature ladder. Free variables move by single-bit flips,
/// grouped variables by relocating the group's hot bit. Reads run in
/// parallel with per-read seeds derived from (seed, read index); the result
/// is the lowest-energy read, first read winning ties, so it does not depend
/// on the thread count.
SolveResult solve(const QuboModel& model, const AnnealConfig& config,
                  const AnnealDebug* debug = nullptr);

/// Single-threaded reference for solve(); same reads, same result.
SolveResult solve_serial(const QuboModel& model, const AnnealConfig& config);

/// Temperatures actually used for a model and config (auto values resolved).
struct TemperatureRange {
    double initial;
    double final;
};
TemperatureRange resolve_temperatures(const QuboModel& model, const AnnealConfig& config);

inline constexpr std::size_t kBruteForceMaxVars = 25;

/// Exact minimum over feasible assignments by enumeration (Gray-code walk,
/// parallel over prefixes). Ties go to the lexicographically smallest bit
/// string. Throws CapacityError above kBruteForceMaxVars variables.
SolveResult brute_force(const QuboModel& model, const OneHotGroups& one_hot_groups = {});

/// Plain enumeration reference for brute_force().
SolveResult brute_force_serial(const QuboModel& model, const OneHotGroups& one_hot_groups = {});

/// Throws ValidationError for empty, out-of-range or overlapping groups.
void validate_groups(const OneHotGroups& groups, std::size_t n_vars);

bool satisfies_groups(std::span<const std::uint8_t> x, const OneHotGroups& groups);

}  // namespace fmqubos
