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

#include "fmqubos/blackbox.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "fmqubos/anneal.hpp"
#include "fmqubos/errors.hpp"
#include "fmqubos/seed.hpp"

namespace fmqubos {

PolynomialBlackBox::PolynomialBlackBox(HuboModel hidden, OneHotGroups groups, double noise_sd,
                                       std::uint64_t noise_seed)
        : hidden_(std::move(hidden)),
          groups_(std::move(groups)),
          noise_sd_(noise_sd),
          noise_seed_(noise_seed) {
    hidden_.validate();
    validate_groups(groups_, hidden_.num_variables());
    if (!(noise_sd_ >= 0.0)) throw ValidationError("noise_sd must be >= 0");
    std::vector<std::uint8_t> grouped(hidden_.num_variables(), 0);
    for (const auto& g : groups_) {
        for (std::size_t i : g) grouped[i] = 1;
    }
    for (std::size_t i = 0; i < grouped.size(); ++i) {
        if (!grouped[i]) free_.push_back(i);
    }
}

BinaryVector PolynomialBlackBox::random_input(std::uint64_t seed) const {
    Rng rng(seed);
    BinaryVector x(input_length(), 0);
    for (const auto& g : groups_) {
        std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
        x[g[pick(rng)]] = 1;
    }
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i : free_) x[i] = coin(rng) ? 1 : 0;
    return x;
}

Dataset PolynomialBlackBox::sample(std::size_t n, std::uint64_t seed) const {
    Dataset out;
    for (std::size_t r = 0; r < n; ++r) {
        BinaryVector x = random_input(derive_seed(seed, "bbs", {r}));
        const double y = query(x);
        out.push_back(std::move(x), y);
    }
    return out;
}

double PolynomialBlackBox::query(std::span<const std::uint8_t> x) const {
    double y = hidden_.energy(x);
    if (noise_sd_ > 0.0) {
        std::uint64_t key = noise_seed_;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i]) key = mix64(key ^ (i + 1));
        }
        Rng rng(key);
        std::normal_distribution<double> normal(0.0, noise_sd_);
        y += normal(rng);
    }
    return y;
}

TableBlackBox::TableBlackBox(const Dataset& table, OneHotGroups groups) : groups_(std::move(groups)) {
    table.validate();
    width_ = table.width();
    validate_groups(groups_, width_);
    for (std::size_t r = 0; r < table.size(); ++r) {
        auto [it, inserted] = table_.emplace(table.inputs[r], table.targets[r]);
        if (!inserted && it->second != table.targets[r]) {
            throw ValidationError("input at row " + std::to_string(r) +
                                  " is measured twice with different responses");
        }
    }
    for (const auto& kv : table_) rows_.push_back(&kv);
}

Dataset TableBlackBox::sample(std::size_t n, std::uint64_t seed) const {
    if (n > rows_.size()) {
        throw ValidationError("cannot draw " + std::to_string(n) + " distinct samples from " +
                              std::to_string(rows_.size()));
    }
    std::vector<std::size_t> order(rows_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "table-bbs"));
    std::shuffle(order.begin(), order.end(), rng);
    Dataset out;
    for (std::size_t r = 0; r < n; ++r) out.push_back(rows_[order[r]]->first, rows_[order[r]]->second);
    return out;
}

double TableBlackBox::query(std::span<const std::uint8_t> x) const {
    auto it = table_.find(BinaryVector(x.begin(), x.end()));
    if (it == table_.end()) throw DomainError("combination was not measured");
    return it->second;
}

}  // namespace fmqubos
