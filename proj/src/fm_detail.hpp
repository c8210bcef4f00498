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

// Shared helpers for the FM and HOFM translation units.

#include <cstdint>
#include <span>
#include <vector>

#include "fmqubos/fm.hpp"
#include "fmqubos/seed.hpp"

namespace fmqubos::detail {

void check_width(std::size_t got, std::size_t want);
void fill_normal(LatentMatrix& m, double scale, Rng& rng);

/// sum_{i<j} <v_i, v_j> x_i x_j. When `sums` is non-empty it receives
/// sum_i v_if x_i for every factor f.
double pairwise_term(const LatentMatrix& v, std::span<const std::uint8_t> x, std::span<double> sums);

double linear_term(double w0, const std::vector<double>& w, std::span<const std::uint8_t> x);
void soft_threshold(std::vector<double>& w, double amount);
double l1(const std::vector<double>& w);
double frobenius_sq(const LatentMatrix& m);
double sign(double v);

}  // namespace fmqubos::detail
