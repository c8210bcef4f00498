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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmqubos/anneal.hpp"
#include "fmqubos/data.hpp"
#include "fmqubos/fm.hpp"
#include "fmqubos/surrogate.hpp"

namespace fmqubos {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitRuntime = 3 };

/// Bad configuration: unknown keys, unparsable values or violated ranges.
class ConfigError : public std::invalid_argument {
 public:
    explicit ConfigError(const std::string& what, std::vector<std::string> offenders = {})
            : std::invalid_argument(what), offenders_(std::move(offenders)) {}

    const std::vector<std::string>& offenders() const { return offenders_; }

 private:
    std::vector<std::string> offenders_;
};

/// Everything a command needs. Loaded from an INI file with the sections
/// run, grid, synthetic, train, anneal, surrogate and optimize; keys are
/// listed by RunConfig::keys().
struct RunConfig {
    // [run]
    /// synthetic, 1 or 2.
    std::string scenario = "synthetic";
    std::filesystem::path data;
    std::filesystem::path output = "results.csv";
    std::vector<std::uint64_t> seeds{0};
    /// Scenario two: restrict to one cell line (empty: all).
    std::string cell_line;
    /// Scenario one: use only the first max_cases matrices (0: all).
    std::size_t max_cases = 0;

    // [grid]
    /// n_extra (scenario one), missing ratio (scenario two) or number of
    /// training samples (synthetic).
    std::vector<double> n1{300};
    std::vector<std::size_t> m{0};

    // [synthetic]
    SyntheticSpec synthetic;
    std::size_t n_test = 100;

    TrainConfig train;
    /// num_reads, sweeps_per_read and the temperatures; seeds are derived.
    AnnealConfig anneal;

    // [surrogate]
    std::size_t i_max = 10;
    double epsilon = 1e-3;
    bool warm_start = true;
    bool skip_duplicates = false;

    // [optimize]
    /// fmqubo, hofmqubo or fmqubos.
    std::string optimizer = "fmqubos";
    /// synthetic, table or hubo.
    std::string blackbox = "synthetic";
    /// HUBO text file for blackbox = hubo.
    std::filesystem::path model;
    std::size_t n_initial = 20;
    std::size_t order = 3;
    std::size_t m_slack = 0;
    /// Scenario one table box: index of the dose-response matrix.
    std::size_t case_index = 0;

    /// Every accepted "section.key".
    static std::vector<std::string> keys();

    /// Sets one key from its textual values. Throws ConfigError for unknown
    /// keys or values that do not parse.
    void set(const std::string& key, const std::vector<std::string>& values);
    /// "section.key=value" form used by --set.
    void set(const std::string& assignment);

    /// Throws ConfigError.
    void validate() const;

    /// Sorted key=value lines covering every field except run.output.
    std::string canonical() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;

    SurrogateConfig surrogate() const;
};

/// Throws ConfigError listing every unknown key at once.
RunConfig parse_run_config(std::istream& in, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

// -- commands ---------------------------------------------------------------

struct ScenarioRow {
    std::string scenario;
    std::string case_label;
    std::uint64_t seed = 0;
    GridCell cell;
};

/// Runs grid_test for every case and seed, writes the CSV to
/// config.output and returns the rows in file order.
std::vector<ScenarioRow> run_scenario(const RunConfig& config, std::ostream& log);

/// Writes the grid CSV (comment line, header, rows).
void write_grid_csv(std::ostream& out, const RunConfig& config, const std::vector<ScenarioRow>& rows);

/// Mean/std of the correlations and the nonzero-slack fraction per (n1, m).
void print_summary(std::ostream& out, const std::vector<ScenarioRow>& rows);

struct OptimizeRun {
    std::uint64_t seed = 0;
    OptimizeResult result;
};

/// Runs the configured optimiser once per seed and writes the trace CSV to
/// config.output.
std::vector<OptimizeRun> run_optimize(const RunConfig& config, std::ostream& log);

void write_trace_csv(std::ostream& out, const RunConfig& config, const std::vector<OptimizeRun>& runs);

/// Writes spec.json, hidden.hubo and, when n_samples > 0, samples.csv into dir.
void gen_synthetic(const RunConfig& config, const std::filesystem::path& dir, std::size_t n_samples);

/// Reads a QUBO text file, anneals (or enumerates when exact) and prints
/// energy, assignment, feasibility and the best read.
void solve_qubo_file(const std::filesystem::path& path, const AnnealConfig& config, bool exact, std::ostream& out);

/// Full command-line entry point; returns an ExitCode.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fmqubos
