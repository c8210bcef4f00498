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
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fmqubos {

/// Assignment of {0,1} values. Every element is exactly 0 or 1.
using BinaryVector = std::vector<std::uint8_t>;

/// Assignment of {-1,+1} values.
using SpinVector = std::vector<std::int8_t>;

/// Index sets that must each contain exactly one 1-bit.
using OneHotGroups = std::vector<std::vector<std::size_t>>;

/// Throws ValidationError unless every element is 0 or 1.
void check_binary(std::span<const std::uint8_t> x);

/// Throws ValidationError unless every element is -1 or +1.
void check_spin(std::span<const std::int8_t> s);

std::size_t popcount(std::span<const std::uint8_t> x);

/// Quadratic objective over binary variables:
///     c0 + sum_i Q_i x_i + sum_{i<j} Q_ij x_i x_j
///
/// Pairs are stored once with i<j. Insertions accumulate and entries that
/// accumulate to exactly zero are dropped, so the stored form is canonical.
class QuboModel {
 public:
    using pair_type = std::pair<std::size_t, std::size_t>;

    QuboModel() = default;
    explicit QuboModel(std::size_t n_vars) : linear_(n_vars, 0.0) {}

    std::size_t num_variables() const { return linear_.size(); }

    /// Grow to at least n variables; new variables have zero coefficients.
    void resize(std::size_t n);

    /// Add a new zero-coefficient variable and return its index.
    std::size_t add_variable();

    void add_constant(double c) { constant_ += c; }
    void add_linear(std::size_t i, double bias);
    /// i == j is folded into the linear term since x_i^2 = x_i.
    void add_quadratic(std::size_t i, std::size_t j, double bias);

    double constant() const { return constant_; }
    double linear(std::size_t i) const;
    double quadratic(std::size_t i, std::size_t j) const;

    const std::vector<double>& linear_terms() const { return linear_; }
    const std::map<pair_type, double>& quadratic_terms() const { return quadratic_; }
    std::size_t num_interactions() const { return quadratic_.size(); }

    double energy(std::span<const std::uint8_t> x) const;

 private:
    void check_index(std::size_t i) const;

    std::vector<double> linear_;
    std::map<pair_type, double> quadratic_;
    double constant_ = 0.0;
};

/// Spin model: offset + sum_{i<j} J_ij s_i s_j + sum_i h_i s_i.
class IsingModel {
 public:
    using pair_type = QuboModel::pair_type;

    IsingModel() = default;
    explicit IsingModel(std::size_t n_vars) : fields_(n_vars, 0.0) {}

    std::size_t num_variables() const { return fields_.size(); }

    void add_offset(double c) { offset_ += c; }
    void add_field(std::size_t i, double h);
    void add_coupling(std::size_t i, std::size_t j, double J);

    double offset() const { return offset_; }
    double field(std::size_t i) const { return fields_.at(i); }
    double coupling(std::size_t i, std::size_t j) const;

    const std::vector<double>& fields() const { return fields_; }
    const std::map<pair_type, double>& couplings() const { return couplings_; }

    double energy(std::span<const std::int8_t> s) const;

 private:
    std::vector<double> fields_;
    std::map<pair_type, double> couplings_;
    double offset_ = 0.0;
};

/// Polynomial of any order over binary variables. Keys are sorted,
/// duplicate-free, non-empty index sets.
class HuboModel {
 public:
    using term_type = std::vector<std::size_t>;
    using terms_type = std::map<term_type, double>;

    HuboModel() = default;
    explicit HuboModel(std::size_t n_vars) : n_vars_(n_vars) {}

    /// Takes raw terms verbatim. Throws ValidationError if any key is empty,
    /// unsorted, has repeated indices or is out of range.
    HuboModel(std::size_t n_vars, terms_type terms, double constant = 0.0);

    std::size_t num_variables() const { return n_vars_; }
    std::size_t max_order() const;

    /// Sorts the index set and collapses repeats (x_i^2 = x_i) before
    /// accumulating. An empty set adds to the constant.
    void add_term(term_type indices, double coefficient);
    void add_constant(double c) { constant_ += c; }

    double constant() const { return constant_; }
    double coefficient(const term_type& sorted_indices) const;
    const terms_type& terms() const { return terms_; }

    /// Throws ValidationError if the canonical-form invariants are broken.
    void validate() const;

    double energy(std::span<const std::uint8_t> x) const;

 private:
    std::size_t n_vars_ = 0;
    terms_type terms_;
    double constant_ = 0.0;
};

/// Checked evaluation: DimensionError on a length mismatch, ValidationError
/// on values outside the domain. The member energy() skips the value check.
double qubo_energy(const QuboModel& model, std::span<const std::uint8_t> x);
double ising_energy(const IsingModel& model, std::span<const std::int8_t> s);
double hubo_energy(const HuboModel& model, std::span<const std::uint8_t> x);

/// Substitutes x_i = (1 - s_i) / 2; the offset carries the constant so
/// energies agree exactly on paired assignments.
IsingModel qubo_to_ising(const QuboModel& model);

/// Substitutes s_i = 1 - 2 x_i.
QuboModel ising_to_qubo(const IsingModel& model);

SpinVector binary_to_spin(std::span<const std::uint8_t> x);
BinaryVector spin_to_binary(std::span<const std::int8_t> s);

/// Coefficient-wise comparison with missing entries treated as zero.
bool approx_equal(const QuboModel& a, const QuboModel& b, double tol);
bool approx_equal(const IsingModel& a, const IsingModel& b, double tol);

/// slack = parent_i * parent_j, enforced by the penalty gadget.
struct SlackBinding {
    std::size_t slack_index;
    std::size_t parent_i;
    std::size_t parent_j;

    friend bool operator==(const SlackBinding&, const SlackBinding&) = default;
};

struct ReductionResult {
    QuboModel qubo;
    std::size_t n_original = 0;
    std::vector<SlackBinding> slack_bindings;
    double penalty_weight = 0.0;

    /// Drops the slack block from a full assignment of qubo.
    BinaryVector original_part(std::span<const std::uint8_t> z) const;

    /// True when every slack equals the product of its parents in z.
    bool bindings_satisfied(std::span<const std::uint8_t> z) const;
};

/// Gadget value x*y - 2*x*z - 2*y*z + 3*z. Zero iff z == x*y, else >= 1.
int gadget_penalty(int x, int y, int z);

/// Default penalty weight: 1 + sum of |coefficient| over all terms.
double default_penalty_weight(const HuboModel& model);

/// Quadratizes a HUBO by repeatedly substituting a product pair with a fresh
/// slack variable and adding lambda * gadget_penalty for each binding.
///
/// At each step an existing binding is reused if its pair still occurs in
/// some term of order > 2. Otherwise the pair occurring in the most such
/// terms is bound (ties: lexicographically smallest pair). Slack variables
/// are appended after the original ones in creation order.
ReductionResult reduce_hubo_to_qubo(const HuboModel& model,
                                    std::optional<double> penalty_weight = std::nullopt);

/// Adds weight * (sum_{i in g} x_i - 1)^2 for every group g.
QuboModel add_one_hot_penalty(const QuboModel& model, const OneHotGroups& groups,
                              double weight);

/// Bits x_{-p} .. x_q (index 0 holds 2^-p) with value = sum x_i 2^i.
/// Throws RangeError when the value is negative, too large, or not a
/// multiple of 2^-p.
BinaryVector encode_binary(double value, int p, int q);
double decode_binary(std::span<const std::uint8_t> bits, int p);

BinaryVector encode_integer(std::int64_t value, int p, int q);
std::int64_t decode_integer(std::span<const std::uint8_t> bits, int p);

}  // namespace fmqubos
