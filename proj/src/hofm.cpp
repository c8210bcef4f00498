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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fmqubos/errors.hpp"
#include "fmqubos/fm.hpp"
#include "fm_detail.hpp"

namespace fmqubos {

using namespace detail;

double hofm_predict(const HofmModel& model, std::span<const std::uint8_t> x) {
    check_width(x.size(), model.num_features());
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i]) active.push_back(i);
    }
    const std::size_t k = model.latent_dim();
    double y = model.w0;
    for (std::size_t a : active) y += model.w[a];
    for (std::size_t a = 0; a < active.size(); ++a) {
        for (std::size_t b = a + 1; b < active.size(); ++b) {
            for (std::size_t f = 0; f < k; ++f) y += model.v2(active[a], f) * model.v2(active[b], f);
            for (std::size_t c = b + 1; c < active.size(); ++c) {
                for (std::size_t f = 0; f < k; ++f) {
                    y += model.v3(active[a], f) * model.v3(active[b], f) * model.v3(active[c], f);
                }
            }
        }
    }
    return y;
}

namespace {

struct CubicSums {
    std::vector<double> p1, p2;
};

/// Third elementary symmetric polynomial of {v3_if : x_i = 1} summed over f,
/// via Newton's identities. Power sums are stored for the gradient.
double cubic_term(const LatentMatrix& v, std::span<const std::uint8_t> x, CubicSums* sums) {
    double total = 0.0;
    for (std::size_t f = 0; f < v.cols(); ++f) {
        double p1 = 0.0, p2 = 0.0, p3 = 0.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            if (!x[i]) continue;
            const double a = v(i, f);
            p1 += a;
            p2 += a * a;
            p3 += a * a * a;
        }
        if (sums) {
            sums->p1[f] = p1;
            sums->p2[f] = p2;
        }
        total += (p1 * p1 * p1 - 3.0 * p1 * p2 + 2.0 * p3) / 6.0;
    }
    return total;
}

double fast_predict(const HofmModel& model, std::span<const std::uint8_t> x,
                    std::span<double> pair_sums, CubicSums* cubic) {
    return linear_term(model.w0, model.w, x) + pairwise_term(model.v2, x, pair_sums) +
           cubic_term(model.v3, x, cubic);
}

void accumulate_mse_gradient(const HofmModel& model, const Dataset& data,
                             std::span<const std::size_t> rows, FmGradient& grad) {
    const std::size_t n = model.num_features();
    const std::size_t k = model.latent_dim();
    std::vector<double> pair_sums(k);
    CubicSums cubic{std::vector<double>(k), std::vector<double>(k)};
    const double scale = 2.0 / static_cast<double>(rows.size());
    for (std::size_t r : rows) {
        const auto& x = data.inputs[r];
        const double pred = fast_predict(model, x, pair_sums, &cubic);
        const double coef = scale * (pred - data.targets[r]);
        grad.w0 += coef;
        for (std::size_t i = 0; i < n; ++i) {
            if (!x[i]) continue;
            grad.w[i] += coef;
            for (std::size_t f = 0; f < k; ++f) {
                grad.v(i, f) += coef * (pair_sums[f] - model.v2(i, f));
                // d e3 / d a_i = e2 of the remaining active entries
                const double a = model.v3(i, f);
                const double rest1 = cubic.p1[f] - a;
                const double rest2 = cubic.p2[f] - a * a;
                grad.v3(i, f) += coef * 0.5 * (rest1 * rest1 - rest2);
            }
        }
    }
}

}  // namespace

double hofm_mse(const HofmModel& model, const Dataset& data) {
    if (data.empty()) throw ValidationError("dataset is empty");
    double total = 0.0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        check_width(data.inputs[r].size(), model.num_features());
        const double e = fast_predict(model, data.inputs[r], {}, nullptr) - data.targets[r];
        total += e * e;
    }
    return total / static_cast<double>(data.size());
}

double hofm_objective(const HofmModel& model, const Dataset& data, double beta1, double beta2) {
    return hofm_mse(model, data) + beta1 * l1(model.w) +
           beta2 * (frobenius_sq(model.v2) + frobenius_sq(model.v3));
}

FmGradient hofm_gradient(const HofmModel& model, const Dataset& batch, double beta1, double beta2) {
    batch.validate();
    check_width(batch.width(), model.num_features());
    const std::size_t n = model.num_features();
    const std::size_t k = model.latent_dim();
    FmGradient grad;
    grad.w.assign(n, 0.0);
    grad.v = LatentMatrix(n, k);
    grad.v3 = LatentMatrix(n, k);
    std::vector<std::size_t> rows(batch.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    accumulate_mse_gradient(model, batch, rows, grad);
    for (std::size_t i = 0; i < n; ++i) grad.w[i] += beta1 * sign(model.w[i]);
    for (std::size_t j = 0; j < grad.v.values().size(); ++j) {
        grad.v.values()[j] += 2.0 * beta2 * model.v2.values()[j];
        grad.v3.values()[j] += 2.0 * beta2 * model.v3.values()[j];
    }
    return grad;
}

HofmModel hofm_init(std::size_t n_features, const TrainConfig& config) {
    config.validate();
    HofmModel model(n_features, config.latent_dim);
    Rng rng(derive_seed(config.seed, "hofm-init"));
    fill_normal(model.v2, config.init_scale, rng);
    fill_normal(model.v3, config.init_scale, rng);
    return model;
}

HofmModel hofm_train(const Dataset& data, const TrainConfig& config,
                     const std::optional<HofmModel>& warm_start, TrainReport* report) {
    config.validate();
    data.validate();
    HofmModel model = warm_start ? *warm_start : hofm_init(data.width(), config);
    model.validate();
    check_width(data.width(), model.num_features());
    if (model.latent_dim() != config.latent_dim) {
        throw DimensionError("warm start has latent dimension " + std::to_string(model.latent_dim()) +
                             ", config asks for " + std::to_string(config.latent_dim));
    }

    const std::size_t n = model.num_features();
    const std::size_t k = model.latent_dim();
    const double lr = config.learning_rate;

    auto objective = [&](const HofmModel& m) {
        const double obj = hofm_objective(m, data, config.beta1, config.beta2);
        if (!std::isfinite(obj)) throw TrainingError("training loss became non-finite");
        return obj;
    };

    HofmModel best = model;
    double best_obj = objective(model);
    const double initial_obj = best_obj;
    double prev_obj = best_obj;
    std::size_t stalled = 0;
    std::size_t epoch = 0;

    Rng rng(derive_seed(config.seed, "hofm-shuffle"));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    FmGradient grad;
    grad.w.assign(n, 0.0);
    grad.v = LatentMatrix(n, k);
    grad.v3 = LatentMatrix(n, k);

    while (epoch < config.epochs) {
        ++epoch;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            grad.w0 = 0.0;
            std::fill(grad.w.begin(), grad.w.end(), 0.0);
            std::fill(grad.v.values().begin(), grad.v.values().end(), 0.0);
            std::fill(grad.v3.values().begin(), grad.v3.values().end(), 0.0);
            accumulate_mse_gradient(model, data, std::span(order).subspan(start, stop - start), grad);

            model.w0 -= lr * grad.w0;
            for (std::size_t i = 0; i < n; ++i) model.w[i] -= lr * grad.w[i];
            soft_threshold(model.w, lr * config.beta1);
            auto& v2 = model.v2.values();
            auto& v3 = model.v3.values();
            for (std::size_t j = 0; j < v2.size(); ++j) {
                v2[j] -= lr * (grad.v.values()[j] + 2.0 * config.beta2 * v2[j]);
                v3[j] -= lr * (grad.v3.values()[j] + 2.0 * config.beta2 * v3[j]);
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

HuboModel hofm_to_hubo(const HofmModel& model) {
    model.validate();
    const std::size_t n = model.num_features();
    const std::size_t k = model.latent_dim();
    HuboModel h(n);
    h.add_constant(model.w0);
    for (std::size_t i = 0; i < n; ++i) h.add_term({i}, model.w[i]);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            double dot = 0.0;
            for (std::size_t f = 0; f < k; ++f) dot += model.v2(a, f) * model.v2(b, f);
            h.add_term({a, b}, dot);
            for (std::size_t c = b + 1; c < n; ++c) {
                double triple = 0.0;
                for (std::size_t f = 0; f < k; ++f) {
                    triple += model.v3(a, f) * model.v3(b, f) * model.v3(c, f);
                }
                h.add_term({a, b, c}, triple);
            }
        }
    }
    return h;
}

}  // namespace fmqubos
