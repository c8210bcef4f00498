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
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fmqubos/anneal.hpp"
#include "fmqubos/binopt.hpp"
#include "fmqubos/blackbox.hpp"
#include "fmqubos/fm.hpp"
#include "fmqubos/metrics.hpp"

namespace fmqubos {

struct SurrogateConfig {
    /// Number of slack variables appended to every input.
    std::size_t m_slack = 0;
    /// Initial slack assignment; empty means all zeros.
    BinaryVector slack_init;
    std::size_t i_max = 10;
    double epsilon = 1e-3;
    TrainConfig train;
    /// one_hot_groups is ignored; groups come from the black box or dataset.
    AnnealConfig anneal;
    /// Retrain from the previous iteration's parameters.
    bool warm_start = true;
    /// When the solver proposes an input already in the sample set, query a
    /// random single-move neighbour instead (optimisation loops only).
    bool skip_duplicates = false;
    /// Master seed; per-iteration training and annealing seeds derive from it.
    std::uint64_t seed = 0;

    void validate() const;
    BinaryVector initial_slack() const;
};

struct IterationRecord {
    std::size_t iteration = 0;  // 1-based
    std::size_t n_samples = 0;  // training rows used in this iteration
    BinaryVector x;             // solver state, original block
    BinaryVector s;             // solver state, slack block
    double y_model = 0.0;       // minimum QUBO energy found
    double y_true = std::numeric_limits<double>::quiet_NaN();  // black-box response
    double train_loss = 0.0;    // MSE on the training rows
    std::optional<double> test_mse;
    std::optional<double> test_pearson;
    std::optional<double> test_spearman;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

using IterationTrace = std::vector<IterationRecord>;

// -- building blocks --------------------------------------------------------

/// Z = [X, S]: the same slack row appended to every input.
Dataset stack_slack(const Dataset& data, std::span<const std::uint8_t> s);
BinaryVector stack_slack(std::span<const std::uint8_t> x, std::span<const std::uint8_t> s);

struct FqmResult {
    FmModel model;
    QuboModel qubo;
    TrainReport report;
};

/// One FM-QUBO step: train an FM on [X, S] and extract its QUBO. Slack
/// variables occupy the trailing block [width, width + |s|).
FqmResult fqm(const Dataset& data, std::span<const std::uint8_t> s, const TrainConfig& train,
              const std::optional<FmModel>& warm_start = std::nullopt);

std::size_t count_nonzero_slack(std::span<const std::uint8_t> s);

// -- optimisation loops -----------------------------------------------------

struct OptimizeResult {
    BinaryVector x;
    double y = 0.0;       // surrogate minimum
    double y_true = 0.0;  // black-box response at x
    bool converged = false;
    IterationTrace trace;
    Dataset samples;      // final sample set
};

/// Train FM -> QUBO -> solve -> query, appending each proposal until the
/// surrogate minimum matches the true response within epsilon.
OptimizeResult fmqubo_optimize(const BlackBox& box, std::size_t n_initial, const SurrogateConfig& config);

/// As fmqubo_optimize with an order-3 HOFM whose HUBO is quadratized before
/// solving. Reduction slacks are stripped before querying and recorded in
/// IterationRecord::s.
OptimizeResult hofmqubo_optimize(const BlackBox& box, std::size_t n_initial, std::size_t order,
                                 const SurrogateConfig& config);

/// FM with m trailing slack variables. Each iteration re-reads the slack
/// assignment from the solver state and keeps it for the next one.
OptimizeResult fmqubos_optimize(const BlackBox& box, std::size_t n_initial, const SurrogateConfig& config);

// -- regression -------------------------------------------------------------

struct FqexResult {
    FmModel model;
    BinaryVector slack;          // final slack assignment
    double loss = 0.0;           // final training MSE
    bool loss_converged = false; // loss < epsilon before i_max
    IterationTrace trace;
    std::vector<double> test_predictions;
    double test_mse = 0.0;
    /// Unset when the test predictions or targets are constant.
    std::optional<CaseMetrics> test_metrics;
};

/// Slack-variable regression: fqm -> solve -> update slack -> training loss,
/// stopping once the loss drops below epsilon or after i_max rounds. Test
/// inputs are extended with the final slack vector.
FqexResult fqex(const Dataset& train, const Dataset& test, const OneHotGroups& groups,
                const SurrogateConfig& config);

// -- grid -------------------------------------------------------------------

struct GridCell {
    double n1 = 0.0;  // training-size parameter (count or missing ratio)
    std::size_t m = 0;
    std::uint64_t seed = 0;
    double pearson = std::numeric_limits<double>::quiet_NaN();
    double spearman = std::numeric_limits<double>::quiet_NaN();
    double train_loss = std::numeric_limits<double>::quiet_NaN();
    std::size_t iterations = 0;
    std::size_t n_nonzero_slack = 0;
    /// Training finished and both test correlations are defined.
    bool converged = false;
};

struct GridResult {
    /// Row-major over (n1, m).
    std::vector<GridCell> cells;

    /// Mean fraction of slack bits set to 1, per m > 0, over converged cells.
    std::map<std::size_t, double> nonzero_slack_fraction() const;
};

/// Returns (train, test) for a training-size parameter and a seed.
using Splitter = std::function<std::pair<Dataset, Dataset>(double n1, std::uint64_t seed)>;

/// Runs fqex for every (n1, m) with an all-zero initial slack. Each cell's
/// seed derives from (master_seed, n1 index, m), so cells are independent
/// and are evaluated in parallel.
GridResult grid_test(const Splitter& split, const OneHotGroups& groups, std::span<const double> n1_values,
                     std::span<const std::size_t> m_values, const SurrogateConfig& config,
                     std::uint64_t master_seed);

/// Inclusive integer ranges [n_a, n_b] x [m_a, m_b].
GridResult grid_test(const Splitter& split, const OneHotGroups& groups, std::pair<std::size_t, std::size_t> n_range,
                     std::pair<std::size_t, std::size_t> m_range, const SurrogateConfig& config,
                     std::uint64_t master_seed);

}  // namespace fmqubos
