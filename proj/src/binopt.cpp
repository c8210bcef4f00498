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

#include "fmqubos/binopt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fmqubos/errors.hpp"

namespace fmqubos {

namespace {

void check_length(std::size_t got, std::size_t want) {
    if (got != want) {
        throw DimensionError("assignment has length " + std::to_string(got) +
                             ", model has " + std::to_string(want) + " variables");
    }
}

QuboModel::pair_type ordered(std::size_t i, std::size_t j) {
    return i < j ? QuboModel::pair_type{i, j} : QuboModel::pair_type{j, i};
}

void accumulate(std::map<QuboModel::pair_type, double>& terms, QuboModel::pair_type key,
                double bias) {
    auto [it, inserted] = terms.try_emplace(key, bias);
    if (!inserted) it->second += bias;
    if (it->second == 0.0) terms.erase(it);
}

}  // namespace

void check_binary(std::span<const std::uint8_t> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 1) {
            throw ValidationError("element " + std::to_string(i) + " is not binary");
        }
    }
}

void check_spin(std::span<const std::int8_t> s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != 1 && s[i] != -1) {
            throw ValidationError("element " + std::to_string(i) + " is not a spin");
        }
    }
}

std::size_t popcount(std::span<const std::uint8_t> x) {
    return static_cast<std::size_t>(std::count(x.begin(), x.end(), std::uint8_t{1}));
}

// QuboModel

void QuboModel::resize(std::size_t n) {
    if (n > linear_.size()) linear_.resize(n, 0.0);
}

std::size_t QuboModel::add_variable() {
    linear_.push_back(0.0);
    return linear_.size() - 1;
}

void QuboModel::check_index(std::size_t i) const {
    if (i >= linear_.size()) {
        throw ValidationError("variable index " + std::to_string(i) + " out of range");
    }
}

void QuboModel::add_linear(std::size_t i, double bias) {
    check_index(i);
    linear_[i] += bias;
}

void QuboModel::add_quadratic(std::size_t i, std::size_t j, double bias) {
    check_index(i);
    check_index(j);
    if (i == j) {
        linear_[i] += bias;
        return;
    }
    accumulate(quadratic_, ordered(i, j), bias);
}

double QuboModel::linear(std::size_t i) const {
    check_index(i);
    return linear_[i];
}

double QuboModel::quadratic(std::size_t i, std::size_t j) const {
    if (i == j) return linear(i);
    auto it = quadratic_.find(ordered(i, j));
    return it == quadratic_.end() ? 0.0 : it->second;
}

double QuboModel::energy(std::span<const std::uint8_t> x) const {
    check_length(x.size(), linear_.size());
    double e = constant_;
    for (std::size_t i = 0; i < linear_.size(); ++i) {
        if (x[i]) e += linear_[i];
    }
    for (const auto& [key, bias] : quadratic_) {
        if (x[key.first] && x[key.second]) e += bias;
    }
    return e;
}

// IsingModel

void IsingModel::add_field(std::size_t i, double h) {
    if (i >= fields_.size()) throw ValidationError("spin index out of range");
    fields_[i] += h;
}

void IsingModel::add_coupling(std::size_t i, std::size_t j, double J) {
    if (i >= fields_.size() || j >= fields_.size()) {
        throw ValidationError("spin index out of range");
    }
    if (i == j) {
        // s_i^2 = 1
        offset_ += J;
        return;
    }
    accumulate(couplings_, ordered(i, j), J);
}

double IsingModel::coupling(std::size_t i, std::size_t j) const {
    auto it = couplings_.find(ordered(i, j));
    return it == couplings_.end() ? 0.0 : it->second;
}

double IsingModel::energy(std::span<const std::int8_t> s) const {
    check_length(s.size(), fields_.size());
    double e = offset_;
    for (const auto& [key, J] : couplings_) e += J * s[key.first] * s[key.second];
    for (std::size_t i = 0; i < fields_.size(); ++i) e += fields_[i] * s[i];
    return e;
}

// HuboModel

HuboModel::HuboModel(std::size_t n_vars, terms_type terms, double constant)
        : n_vars_(n_vars), terms_(std::move(terms)), constant_(constant) {
    validate();
}

void HuboModel::validate() const {
    for (const auto& [key, coeff] : terms_) {
        if (key.empty()) throw ValidationError("HUBO term with empty index set");
        for (std::size_t t = 0; t < key.size(); ++t) {
            if (key[t] >= n_vars_) {
                throw ValidationError("HUBO term index " + std::to_string(key[t]) +
                                      " out of range");
            }
            if (t > 0 && key[t - 1] >= key[t]) {
                throw ValidationError("HUBO term indices are not sorted and distinct");
            }
        }
    }
}

std::size_t HuboModel::max_order() const {
    std::size_t order = 0;
    for (const auto& [key, coeff] : terms_) order = std::max(order, key.size());
    return order;
}

void HuboModel::add_term(term_type indices, double coefficient) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (indices.empty()) {
        constant_ += coefficient;
        return;
    }
    if (indices.back() >= n_vars_) {
        throw ValidationError("HUBO term index " + std::to_string(indices.back()) +
                              " out of range");
    }
    auto [it, inserted] = terms_.try_emplace(std::move(indices), coefficient);
    if (!inserted) it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
}

double HuboModel::coefficient(const term_type& sorted_indices) const {
    auto it = terms_.find(sorted_indices);
    return it == terms_.end() ? 0.0 : it->second;
}

double HuboModel::energy(std::span<const std::uint8_t> x) const {
    check_length(x.size(), n_vars_);
    double e = constant_;
    for (const auto& [key, coeff] : terms_) {
        bool on = true;
        for (std::size_t i : key) {
            if (!x[i]) {
                on = false;
                break;
            }
        }
        if (on) e += coeff;
    }
    return e;
}

double qubo_energy(const QuboModel& model, std::span<const std::uint8_t> x) {
    check_binary(x);
    return model.energy(x);
}

double ising_energy(const IsingModel& model, std::span<const std::int8_t> s) {
    check_spin(s);
    return model.energy(s);
}

double hubo_energy(const HuboModel& model, std::span<const std::uint8_t> x) {
    check_binary(x);
    return model.energy(x);
}

// conversions

IsingModel qubo_to_ising(const QuboModel& model) {
    const std::size_t n = model.num_variables();
    IsingModel out(n);
    double offset = model.constant();
    std::vector<double> h(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = model.linear_terms()[i];
        h[i] -= q / 2;
        offset += q / 2;
    }
    for (const auto& [key, q] : model.quadratic_terms()) {
        const double quarter = q / 4;
        out.add_coupling(key.first, key.second, quarter);
        h[key.first] -= quarter;
        h[key.second] -= quarter;
        offset += quarter;
    }
    for (std::size_t i = 0; i < n; ++i) out.add_field(i, h[i]);
    out.add_offset(offset);
    return out;
}

QuboModel ising_to_qubo(const IsingModel& model) {
    const std::size_t n = model.num_variables();
    QuboModel out(n);
    double constant = model.offset();
    std::vector<double> lin(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = model.fields()[i];
        constant += h;
        lin[i] -= 2 * h;
    }
    for (const auto& [key, J] : model.couplings()) {
        constant += J;
        lin[key.first] -= 2 * J;
        lin[key.second] -= 2 * J;
        out.add_quadratic(key.first, key.second, 4 * J);
    }
    for (std::size_t i = 0; i < n; ++i) out.add_linear(i, lin[i]);
    out.add_constant(constant);
    return out;
}

SpinVector binary_to_spin(std::span<const std::uint8_t> x) {
    SpinVector s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? -1 : 1;
    return s;
}

BinaryVector spin_to_binary(std::span<const std::int8_t> s) {
    BinaryVector x(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) x[i] = s[i] < 0 ? 1 : 0;
    return x;
}

namespace {

bool maps_close(const std::map<QuboModel::pair_type, double>& a,
                const std::map<QuboModel::pair_type, double>& b, double tol) {
    for (const auto& [key, v] : a) {
        auto it = b.find(key);
        if (std::abs(v - (it == b.end() ? 0.0 : it->second)) > tol) return false;
    }
    for (const auto& [key, v] : b) {
        if (!a.contains(key) && std::abs(v) > tol) return false;
    }
    return true;
}

bool vectors_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

}  // namespace

bool approx_equal(const QuboModel& a, const QuboModel& b, double tol) {
    return std::abs(a.constant() - b.constant()) <= tol &&
           vectors_close(a.linear_terms(), b.linear_terms(), tol) &&
           maps_close(a.quadratic_terms(), b.quadratic_terms(), tol);
}

bool approx_equal(const IsingModel& a, const IsingModel& b, double tol) {
    return std::abs(a.offset() - b.offset()) <= tol &&
           vectors_close(a.fields(), b.fields(), tol) &&
           maps_close(a.couplings(), b.couplings(), tol);
}

// reduction

int gadget_penalty(int x, int y, int z) { return x * y - 2 * x * z - 2 * y * z + 3 * z; }

double default_penalty_weight(const HuboModel& model) {
    double total = 1.0;
    for (const auto& [key, coeff] : model.terms()) total += std::abs(coeff);
    return total;
}

BinaryVector ReductionResult::original_part(std::span<const std::uint8_t> z) const {
    if (z.size() < n_original) throw DimensionError("assignment shorter than original block");
    return BinaryVector(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n_original));
}

bool ReductionResult::bindings_satisfied(std::span<const std::uint8_t> z) const {
    for (const SlackBinding& b : slack_bindings) {
        if (z[b.slack_index] != (z[b.parent_i] & z[b.parent_j])) return false;
    }
    return true;
}

namespace {

bool contains_pair(const HuboModel::term_type& term, std::size_t i, std::size_t j) {
    return std::binary_search(term.begin(), term.end(), i) &&
           std::binary_search(term.begin(), term.end(), j);
}

/// Replaces the pair (i, j) by z in every term of order > 2 that holds both.
void substitute(HuboModel::terms_type& terms, const SlackBinding& b) {
    HuboModel::terms_type next;
    for (auto& [key, coeff] : terms) {
        HuboModel::term_type term = key;
        if (term.size() > 2 && contains_pair(term, b.parent_i, b.parent_j)) {
            std::erase(term, b.parent_i);
            std::erase(term, b.parent_j);
            term.insert(std::upper_bound(term.begin(), term.end(), b.slack_index),
                        b.slack_index);
        }
        next[std::move(term)] += coeff;
    }
    terms = std::move(next);
}

}  // namespace

ReductionResult reduce_hubo_to_qubo(const HuboModel& model, std::optional<double> penalty_weight) {
    model.validate();
    if (penalty_weight && !(*penalty_weight > 0.0)) {
        throw ValidationError("penalty weight must be positive");
    }

    ReductionResult result;
    result.n_original = model.num_variables();
    result.penalty_weight = penalty_weight.value_or(default_penalty_weight(model));

    HuboModel::terms_type terms = model.terms();
    std::size_t n_vars = model.num_variables();

    auto has_high_order = [&] {
        return std::any_of(terms.begin(), terms.end(),
                           [](const auto& kv) { return kv.first.size() > 2; });
    };

    while (has_high_order()) {
        bool reused = false;
        for (const SlackBinding& b : result.slack_bindings) {
            bool occurs = std::any_of(terms.begin(), terms.end(), [&](const auto& kv) {
                return kv.first.size() > 2 && contains_pair(kv.first, b.parent_i, b.parent_j);
            });
            if (occurs) {
                substitute(terms, b);
                reused = true;
                break;
            }
        }
        if (reused) continue;

        std::map<QuboModel::pair_type, std::size_t> counts;
        for (const auto& [key, coeff] : terms) {
            if (key.size() <= 2) continue;
            for (std::size_t a = 0; a < key.size(); ++a) {
                for (std::size_t c = a + 1; c < key.size(); ++c) ++counts[{key[a], key[c]}];
            }
        }
        // std::map iterates in lexicographic order, so strict > keeps the
        // smallest pair among ties.
        QuboModel::pair_type best{};
        std::size_t best_count = 0;
        for (const auto& [pair, count] : counts) {
            if (count > best_count) {
                best = pair;
                best_count = count;
            }
        }
        SlackBinding binding{n_vars++, best.first, best.second};
        result.slack_bindings.push_back(binding);
        substitute(terms, binding);
    }

    QuboModel qubo(n_vars);
    qubo.add_constant(model.constant());
    for (const auto& [key, coeff] : terms) {
        if (key.size() == 1) {
            qubo.add_linear(key[0], coeff);
        } else {
            qubo.add_quadratic(key[0], key[1], coeff);
        }
    }
    const double lambda = result.penalty_weight;
    for (const SlackBinding& b : result.slack_bindings) {
        qubo.add_quadratic(b.parent_i, b.parent_j, lambda);
        qubo.add_quadratic(b.parent_i, b.slack_index, -2 * lambda);
        qubo.add_quadratic(b.parent_j, b.slack_index, -2 * lambda);
        qubo.add_linear(b.slack_index, 3 * lambda);
    }
    result.qubo = std::move(qubo);
    return result;
}

QuboModel add_one_hot_penalty(const QuboModel& model, const OneHotGroups& groups, double weight) {
    if (!(weight > 0.0)) throw ValidationError("one-hot penalty weight must be positive");
    QuboModel out = model;
    for (const auto& group : groups) {
        if (group.empty()) throw ValidationError("empty one-hot group");
        std::vector<std::size_t> sorted = group;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ValidationError("one-hot group repeats an index");
        }
        // (sum x - 1)^2 = 1 - sum x_i + 2 sum_{i<j} x_i x_j
        out.add_constant(weight);
        for (std::size_t a = 0; a < sorted.size(); ++a) {
            out.add_linear(sorted[a], -weight);
            for (std::size_t b = a + 1; b < sorted.size(); ++b) {
                out.add_quadratic(sorted[a], sorted[b], 2 * weight);
            }
        }
    }
    return out;
}

// encodings

BinaryVector encode_binary(double value, int p, int q) {
    if (p < 0 || q < 0) throw ValidationError("precision bounds must be non-negative");
    const std::size_t n_bits = static_cast<std::size_t>(p + q + 1);
    if (n_bits > 62) throw RangeError("encoding wider than 62 bits");
    const double scaled = std::ldexp(value, p);
    const double top = std::ldexp(1.0, static_cast<int>(n_bits));
    if (!(scaled >= 0.0) || scaled >= top || scaled != std::floor(scaled)) {
        throw RangeError("value " + std::to_string(value) + " is not representable with p=" +
                         std::to_string(p) + ", q=" + std::to_string(q));
    }
    auto units = static_cast<std::uint64_t>(scaled);
    BinaryVector bits(n_bits, 0);
    for (std::size_t i = 0; i < n_bits; ++i) bits[i] = static_cast<std::uint8_t>((units >> i) & 1U);
    return bits;
}

double decode_binary(std::span<const std::uint8_t> bits, int p) {
    double value = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) value += std::ldexp(1.0, static_cast<int>(i) - p);
    }
    return value;
}

BinaryVector encode_integer(std::int64_t value, int p, int q) {
    return encode_binary(static_cast<double>(value), p, q);
}

std::int64_t decode_integer(std::span<const std::uint8_t> bits, int p) {
    for (std::size_t i = 0; i < bits.size() && static_cast<int>(i) < p; ++i) {
        if (bits[i]) throw RangeError("fractional bit set in integer encoding");
    }
    return static_cast<std::int64_t>(decode_binary(bits, p));
}

}  // namespace fmqubos
