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

#include "fmqubos/fm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "fmqubos/errors.hpp"
#include "fmqubos/seed.hpp"
#include "fm_detail.hpp"

namespace fmqubos {

void Dataset::validate() const {
    if (inputs.empty()) throw ValidationError("dataset is empty");
    if (inputs.size() != targets.size()) {
        throw DimensionError("dataset has " + std::to_string(inputs.size()) + " inputs but " +
                             std::to_string(targets.size()) + " targets");
    }
    const std::size_t n = inputs.front().size();
    for (const auto& x : inputs) {
        if (x.size() != n) throw ValidationError("dataset rows have different widths");
        check_binary(x);
    }
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
    if (!(beta1 >= 0.0) || !(beta2 >= 0.0)) throw ValidationError("regularization weights must be >= 0");
    if (epochs == 0) throw ValidationError("epochs must be >= 1");
    if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
    if (latent_dim == 0) throw ValidationError("latent_dim must be >= 1");
    if (!(init_scale >= 0.0)) throw ValidationError("init_scale must be >= 0");
}

namespace {

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void FmModel::validate() const {
    if (v.cols() == 0) throw ValidationError("latent dimension must be >= 1");
    if (v.rows() != w.size()) throw ValidationError("latent matrix rows do not match features");
    if (!std::isfinite(w0) || !all_finite(w) || !all_finite(v.values())) {
        throw ValidationError("model has non-finite parameters");
    }
}

void HofmModel::validate() const {
    if (v2.cols() == 0 || v3.cols() != v2.cols()) throw ValidationError("bad latent dimension");
    if (v2.rows() != w.size() || v3.rows() != w.size()) {
        throw ValidationError("latent matrix rows do not match features");
    }
    if (!std::isfinite(w0) || !all_finite(w) || !all_finite(v2.values()) ||
        !all_finite(v3.values())) {
        throw ValidationError("model has non-finite parameters");
    }
}

namespace detail {

void check_width(std::size_t got, std::size_t want) {
    if (got != want) {
        throw DimensionError("input has " + std::to_string(got) + " features, model has " +
                             std::to_string(want));
    }
}

void fill_normal(LatentMatrix& m, double scale, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : m.values()) v = scale * normal(rng);
}

double pairwise_term(const LatentMatrix& v, std::span<const std::uint8_t> x,
                     std::span<double> sums) {
    double total = 0.0;
    for (std::size_t f = 0; f < v.cols(); ++f) {
        double s = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            if (!x[i]) continue;
            const double a = v(i, f);
            s += a;
            sq += a * a;
        }
        if (!sums.empty()) sums[f] = s;
        total += 0.5 * (s * s - sq);
    }
    return total;
}

double linear_term(double w0, const std::vector<double>& w, std::span<const std::uint8_t> x) {
    double y = w0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (x[i]) y += w[i];
    }
    return y;
}

void soft_threshold(std::vector<double>& w, double amount) {
    if (amount <= 0.0) return;
    for (double& wi : w) {
        if (wi > amount) {
            wi -= amount;
        } else if (wi < -amount) {
            wi += amount;
        } else {
            wi = 0.0;
        }
    }
}

double l1(const std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) s += std::abs(v);
    return s;
}

double frobenius_sq(const LatentMatrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return s;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

using namespace detail;

double fm_predict(const FmModel& model, std::span<const std::uint8_t> x) {
    check_width(x.size(), model.num_features());
    return linear_term(model.w0, model.w, x) + pairwise_term(model.v, x, {});
}

std::vector<double> fm_predict_batch(const FmModel& model, std::span<const BinaryVector> inputs) {
    for (const auto& x : inputs) check_width(x.size(), model.num_features());
    std::vector<double> out(inputs.size());
    const auto n = static_cast<std::ptrdiff_t>(inputs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        const auto& x = inputs[static_cast<std::size_t>(r)];
        out[static_cast<std::size_t>(r)] =
                linear_term(model.w0, model.w, x) + pairwise_term(model.v, x, {});
    }
    return out;
}

std::vector<double> fm_predict_batch_serial(const FmModel& model,
                                            std::span<const BinaryVector> inputs) {
    std::vector<double> out;
    out.reserve(inputs.size());
    for (const auto& x : inputs) out.push_back(fm_predict(model, x));
    return out;
}

double fm_mse(const FmModel& model, const Dataset& data) {
    if (data.empty()) throw ValidationError("dataset is empty");
    double total = 0.0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double e = fm_predict(model, data.inputs[r]) - data.targets[r];
        total += e * e;
    }
    return total / static_cast<double>(data.size());
}

double fm_objective(const FmModel& model, const Dataset& data, double beta1, double beta2) {
    return fm_mse(model, data) + beta1 * l1(model.w) + beta2 * frobenius_sq(model.v);
}

namespace {

/// Adds the MSE gradient over data[rows] into grad (scaled by 2/|rows|).
void accumulate_mse_gradient(const FmModel& model, const Dataset& data,
                             std::span<const std::size_t> rows, FmGradient& grad) {
    const std::size_t n = model.num_features();
    const std::size_t k = model.latent_dim();
    std::vector<double> sums(k);
    const double scale = 2.0 / static_cast<double>(rows.size());
    for (std::size_t r : rows) {
        const auto& x = data.inputs[r];
        const double pred = linear_term(model.w0, model.w, x) + pairwise_term(model.v, x, sums);
        const double coef = scale * (pred - data.targets[r]);
        grad.w0 += coef;
        for (std::size_t i = 0; i < n; ++i) {
            if (!x[i]) continue;
            grad.w[i] += coef;
            for (std::size_t f = 0; f < k; ++f) grad.v(i, f) += coef * (sums[f] - model.v(i, f));
        }
    }
}

FmGradient zero_gradient(std::size_t n, std::size_t k, bool cubic) {
    FmGradient g;
    g.w.assign(n, 0.0);
    g.v = LatentMatrix(n, k);
    if (cubic) g.v3 = LatentMatrix(n, k);
    return g;
}

}  // namespace

FmGradient fm_gradient(const FmModel& model, const Dataset& batch, double beta1, double beta2) {
    batch.validate();
    check_width(batch.width(), model.num_features());
    FmGradient grad = zero_gradient(model.num_features(), model.latent_dim(), false);
    std::vector<std::size_t> rows(batch.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    accumulate_mse_gradient(model, batch, rows, grad);
    for (std::size_t i = 0; i < grad.w.size(); ++i) grad.w[i] += beta1 * sign(model.w[i]);
    for (std::size_t j = 0; j < grad.v.values().size(); ++j) {
        grad.v.values()[j] += 2.0 * beta2 * model.v.values()[j];
    }
    return grad;
}

FmModel fm_init(std::size_t n_features, const TrainConfig& config) {
    config.validate();
    FmModel model(n_features, config.latent_dim);
    Rng rng(derive_seed(config.seed, "fm-init"));
    fill_normal(model.v, config.init_scale, rng);
    return model;
}

FmModel fm_train(const Dataset& data, const TrainConfig& config,
                 const std::optional<FmModel>& warm_start, TrainReport* report) {
    config.validate();
    data.validate();
    FmModel model = warm_start ? *warm_start : fm_init(data.width(), config);
    model.validate();
    check_width(data.width(), model.num_features());
    if (model.latent_dim() != config.latent_dim) {
        throw DimensionError("warm start has latent dimension " + std::to_string(model.latent_dim()) +
                             ", config asks for " + std::to_string(config.latent_dim));
    }

    const std::size_t n = model.num_features();
    const std::size_t k = model.latent_dim();
    const double lr = config.learning_rate;

    auto objective = [&](const FmModel& m) {
        const double obj = fm_objective(m, data, config.beta1, config.beta2);
        if (!std::isfinite(obj)) throw TrainingError("training loss became non-finite");
        return obj;
    };

    FmModel best = model;
    double best_obj = objective(model);
    const double initial_obj = best_obj;
    double prev_obj = best_obj;
    std::size_t stalled = 0;
    std::size_t epoch = 0;

    Rng rng(derive_seed(config.seed, "fm-shuffle"));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    FmGradient grad = zero_gradient(n, k, false);

    while (epoch < config.epochs) {
        ++epoch;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            grad.w0 = 0.0;
            std::fill(grad.w.begin(), grad.w.end(), 0.0);
            std::fill(grad.v.values().begin(), grad.v.values().end(), 0.0);
            accumulate_mse_gradient(model, data, std::span(order).subspan(start, stop - start), grad);

            model.w0 -= lr * grad.w0;
            for (std::size_t i = 0; i < n; ++i) model.w[i] -= lr * grad.w[i];
            soft_threshold(model.w, lr * config.beta1);
            auto& vv = model.v.values();
            for (std::size_t j = 0; j < vv.size(); ++j) {
                vv[j] -= lr * (grad.v.values()[j] + 2.0 * config.beta2 * vv[j]);
            }
        }
        const double obj = objective(model);
        if (obj < best_obj) {
            best = model;
            best_obj = obj;
        }
        stalled = (prev_obj - obj < config.tolerance) ? stalled + 1 : 0;
        prev_obj = obj;
        if (stalled >= config.patience) break;
    }

    if (report) *report = TrainReport{initial_obj, best_obj, epoch};
    return best;
}

QuboModel fm_to_qubo(const FmModel& model) {
    model.validate();
    const std::size_t n = model.num_features();
    QuboModel q(n);
    q.add_constant(model.w0);
    for (std::size_t i = 0; i < n; ++i) q.add_linear(i, model.w[i]);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t f = 0; f < model.latent_dim(); ++f) dot += model.v(i, f) * model.v(j, f);
            q.add_quadratic(i, j, dot);
        }
    }
    return q;
}

}  // namespace fmqubos
