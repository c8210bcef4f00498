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

#include "fmqubos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fmqubos/errors.hpp"

namespace fmqubos {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
    if (a.size() != b.size()) {
        throw DimensionError("sequences differ in length: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
    if (a.size() < min_len) {
        throw DimensionError("need at least " + std::to_string(min_len) + " values");
    }
}

}  // namespace

double mean(std::span<const double> values) {
    if (values.empty()) throw DimensionError("mean of an empty sequence");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) {
        if (values.empty()) throw DimensionError("std of an empty sequence");
        return 0.0;
    }
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double pearson(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b, 2);
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw UndefinedStatisticError("correlation of a constant sequence");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(values.size());
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t stop = start + 1;
        while (stop < order.size() && values[order[stop]] == values[order[start]]) ++stop;
        // positions start..stop-1 hold 1-based ranks start+1..stop
        const double rank = 0.5 * static_cast<double>(start + 1 + stop);
        for (std::size_t p = start; p < stop; ++p) ranks[order[p]] = rank;
        start = stop;
    }
    return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b, 2);
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson(ra, rb);
}

double mse_loss(std::span<const double> y, std::span<const double> y_pred) {
    check_pair(y, y_pred, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - y_pred[i];
        total += e * e;
    }
    return total / static_cast<double>(y.size());
}

MetricSummary summarize(std::span<const CaseMetrics> cases, std::span<const bool> converged) {
    if (cases.size() != converged.size()) throw DimensionError("metrics and flags are misaligned");
    std::vector<double> p, s;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (!converged[i]) continue;
        p.push_back(cases[i].pearson);
        s.push_back(cases[i].spearman);
    }
    if (p.empty()) throw UndefinedStatisticError("no converged cases to summarize");
    MetricSummary out;
    out.pearson_mean = mean(p);
    out.pearson_std = sample_std(p);
    out.spearman_mean = mean(s);
    out.spearman_std = sample_std(s);
    out.n_cases = p.size();
    out.n_failed = cases.size() - p.size();
    return out;
}

}  // namespace fmqubos
