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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fmqubos/binopt.hpp"

namespace fmqubos {

/// Binary inputs with real responses, one row per sample.
struct Dataset {
    std::vector<BinaryVector> inputs;
    std::vector<double> targets;

    std::size_t size() const { return inputs.size(); }
    bool empty() const { return inputs.empty(); }
    /// Feature width; 0 when empty.
    std::size_t width() const { return inputs.empty() ? 0 : inputs.front().size(); }

    void push_back(BinaryVector x, double y) {
        inputs.push_back(std::move(x));
        targets.push_back(y);
    }

    /// Throws ValidationError on empty data, ragged rows or non-binary bits,
    /// DimensionError when inputs and targets differ in length.
    void validate() const;
};

/// Row-major n x k matrix of latent factors.
class LatentMatrix {
 public:
    LatentMatrix() = default;
    LatentMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t f) { return data_[i * cols_ + f]; }
    double operator()(std::size_t i, std::size_t f) const { return data_[i * cols_ + f]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    friend bool operator==(const LatentMatrix&, const LatentMatrix&) = default;

 private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Second-order factorization machine
///     y = w0 + sum_i w_i x_i + sum_{i<j} <v_i, v_j> x_i x_j
struct FmModel {
    double w0 = 0.0;
    std::vector<double> w;
    LatentMatrix v;

    FmModel() = default;
    FmModel(std::size_t n_features, std::size_t k) : w(n_features, 0.0), v(n_features, k) {}

    std::size_t num_features() const { return w.size(); }
    std::size_t latent_dim() const { return v.cols(); }

    /// Throws ValidationError on k == 0, mismatched shapes or non-finite values.
    void validate() const;

    friend bool operator==(const FmModel&, const FmModel&) = default;
};

/// Order-3 higher-order FM: the FM terms built from v2 plus
///     sum_{j1<j2<j3} <v3_j1, v3_j2, v3_j3> x_j1 x_j2 x_j3
/// where <a, b, c> = sum_f a_f b_f c_f.
struct HofmModel {
    static constexpr std::size_t order = 3;

    double w0 = 0.0;
    std::vector<double> w;
    LatentMatrix v2;
    LatentMatrix v3;

    HofmModel() = default;
    HofmModel(std::size_t n_features, std::size_t k)
            : w(n_features, 0.0), v2(n_features, k), v3(n_features, k) {}

    std::size_t num_features() const { return w.size(); }
    std::size_t latent_dim() const { return v2.cols(); }

    void validate() const;

    friend bool operator==(const HofmModel&, const HofmModel&) = default;
};

/// Mini-batch SGD settings for the regularized loss
///     (1/n) sum (y - y_hat)^2 + beta1 |w|_1 + beta2 |V|_F^2
struct TrainConfig {
    std::size_t latent_dim = 4;
    double learning_rate = 0.003;
    double beta1 = 0.0;
    double beta2 = 0.0;
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    double init_scale = 0.01;
    /// Early stop once the full-batch loss has improved by less than this
    /// over `patience` consecutive epochs.
    double tolerance = 1e-6;
    std::size_t patience = 10;

    void validate() const;
};

/// Gradient with the same layout as the model. For HOFM, v3 is filled too.
struct FmGradient {
    double w0 = 0.0;
    std::vector<double> w;
    LatentMatrix v;
    LatentMatrix v3;
};

struct TrainReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::size_t epochs_run = 0;
};

// -- FM ---------------------------------------------------------------------

/// O(k n) evaluation via sum_f ((sum_i v_if x_i)^2 - sum_i v_if^2 x_i) / 2.
double fm_predict(const FmModel& model, std::span<const std::uint8_t> x);

/// Row-parallel (OpenMP) batch prediction; each row is computed exactly as
/// fm_predict, so results do not depend on the thread count.
std::vector<double> fm_predict_batch(const FmModel& model, std::span<const BinaryVector> inputs);

/// Serial reference for fm_predict_batch.
std::vector<double> fm_predict_batch_serial(const FmModel& model,
                                            std::span<const BinaryVector> inputs);

/// Regularized training objective on a full dataset.
double fm_objective(const FmModel& model, const Dataset& data, double beta1, double beta2);

/// Unregularized mean squared error of the model on the data.
double fm_mse(const FmModel& model, const Dataset& data);

/// Gradient of the regularized objective over `batch`. The L1 part uses the
/// subgradient sign(w_i) with sign(0) = 0.
FmGradient fm_gradient(const FmModel& model, const Dataset& batch, double beta1 = 0.0,
                       double beta2 = 0.0);

/// Fresh model with w0 = 0, w = 0 and V ~ N(0, init_scale).
FmModel fm_init(std::size_t n_features, const TrainConfig& config);

/// Mini-batch SGD. The L1 term is applied as a soft-threshold after each
/// step. Returns the lowest-objective parameters seen on the full batch,
/// including the starting point. Throws TrainingError on a non-finite loss.
FmModel fm_train(const Dataset& data, const TrainConfig& config,
                 const std::optional<FmModel>& warm_start = std::nullopt,
                 TrainReport* report = nullptr);

/// Q_ij = <v_i, v_j>, Q_i = w_i, c0 = w0.
QuboModel fm_to_qubo(const FmModel& model);

// -- HOFM -------------------------------------------------------------------

/// Direct triple loop over active features; intended for small inputs.
double hofm_predict(const HofmModel& model, std::span<const std::uint8_t> x);

double hofm_mse(const HofmModel& model, const Dataset& data);
double hofm_objective(const HofmModel& model, const Dataset& data, double beta1, double beta2);

/// beta2 applies to both latent matrices.
FmGradient hofm_gradient(const HofmModel& model, const Dataset& batch, double beta1 = 0.0,
                         double beta2 = 0.0);

HofmModel hofm_init(std::size_t n_features, const TrainConfig& config);

HofmModel hofm_train(const Dataset& data, const TrainConfig& config,
                     const std::optional<HofmModel>& warm_start = std::nullopt,
                     TrainReport* report = nullptr);

HuboModel hofm_to_hubo(const HofmModel& model);

// -- serialization ----------------------------------------------------------

/// JSON records tagged "fmqubos.fm/1" and "fmqubos.hofm/1".
void save_model(std::ostream& out, const FmModel& model);
void save_model(std::ostream& out, const HofmModel& model);
FmModel load_fm_model(std::istream& in);
HofmModel load_hofm_model(std::istream& in);

}  // namespace fmqubos
