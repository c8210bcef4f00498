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
#include <map>
#include <span>
#include <vector>

#include "fmqubos/binopt.hpp"
#include "fmqubos/fm.hpp"

namespace fmqubos {

/// The system being modelled: batch sampling (BBS) and pointwise query (BBQ).
class BlackBox {
 public:
    virtual ~BlackBox() = default;

    virtual std::size_t input_length() const = 0;

    /// Group structure every sampled input satisfies.
    virtual const OneHotGroups& one_hot_groups() const = 0;

    /// n input/response pairs, deterministic in seed.
    virtual Dataset sample(std::size_t n, std::uint64_t seed) const = 0;

    /// Deterministic response for x.
    virtual double query(std::span<const std::uint8_t> x) const = 0;
};

/// Hidden polynomial over binary inputs plus optional noise. The noise is a
/// fixed function of (noise_seed, x), so query() stays deterministic.
class PolynomialBlackBox : public BlackBox {
 public:
    PolynomialBlackBox(HuboModel hidden, OneHotGroups groups, double noise_sd = 0.0,
                       std::uint64_t noise_seed = 0);

    std::size_t input_length() const override { return hidden_.num_variables(); }
    const OneHotGroups& one_hot_groups() const override { return groups_; }
    Dataset sample(std::size_t n, std::uint64_t seed) const override;
    double query(std::span<const std::uint8_t> x) const override;

    const HuboModel& hidden() const { return hidden_; }
    double noise_sd() const { return noise_sd_; }

    /// Uniform random input: one hot bit per group, fair coins elsewhere.
    BinaryVector random_input(std::uint64_t seed) const;

 private:
    HuboModel hidden_;
    OneHotGroups groups_;
    std::vector<std::size_t> free_;
    double noise_sd_;
    std::uint64_t noise_seed_;
};

/// Exact lookup over measured inputs. Queries outside the table throw
/// DomainError.
class TableBlackBox : public BlackBox {
 public:
    /// Throws ValidationError on an empty table, ragged inputs or one input
    /// mapped to two different responses.
    TableBlackBox(const Dataset& table, OneHotGroups groups);

    std::size_t input_length() const override { return width_; }
    const OneHotGroups& one_hot_groups() const override { return groups_; }
    /// n distinct stored pairs drawn without replacement; n must not exceed size().
    Dataset sample(std::size_t n, std::uint64_t seed) const override;
    double query(std::span<const std::uint8_t> x) const override;

    std::size_t size() const { return table_.size(); }

 private:
    std::map<BinaryVector, double> table_;
    std::vector<const std::pair<const BinaryVector, double>*> rows_;
    OneHotGroups groups_;
    std::size_t width_ = 0;
};

}  // namespace fmqubos
