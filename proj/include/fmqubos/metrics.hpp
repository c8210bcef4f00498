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
#include <span>
#include <vector>

namespace fmqubos {

/// Sample Pearson correlation. Throws DimensionError for mismatched or
/// too-short input and UndefinedStatisticError when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> a, std::span<const double> b);

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Mean squared residual.
double mse_loss(std::span<const double> y, std::span<const double> y_pred);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_std(std::span<const double> values);

struct CaseMetrics {
    double pearson = 0.0;
    double spearman = 0.0;
};

struct MetricSummary {
    double pearson_mean = 0.0;
    double pearson_std = 0.0;
    double spearman_mean = 0.0;
    double spearman_std = 0.0;
    std::size_t n_cases = 0;   // included (converged) cases
    std::size_t n_failed = 0;  // excluded cases
};

/// Mean and sample std over the cases flagged as converged. Throws
/// DimensionError on misaligned input, UndefinedStatisticError when no case
/// converged.
MetricSummary summarize(std::span<const CaseMetrics> cases, std::span<const bool> converged);

}  // namespace fmqubos
