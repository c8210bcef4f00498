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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "fmqubos/errors.hpp"
#include "fmqubos/fm.hpp"
#include "oracles.hpp"

using namespace fmqubos;
using Catch::Matchers::WithinAbs;

namespace {

FmModel two_feature_model() {
    FmModel m;
    m.w0 = 0.0;
    m.w = {1.0, 1.0};
    m.v = LatentMatrix(2, 1);
    m.v(0, 0) = 2.0;
    m.v(1, 0) = 3.0;
    return m;
}

Dataset planted_data(const FmModel& m, std::size_t rows, std::mt19937_64& rng) {
    Dataset d;
    for (std::size_t r = 0; r < rows; ++r) {
        BinaryVector x = oracle::random_bits(m.num_features(), rng);
        const double y = oracle::fm_value(m, x);
        d.push_back(std::move(x), y);
    }
    return d;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

/// Flat view of all parameters, for finite differences.
std::vector<double*> params(FmModel& m) {
    std::vector<double*> p{&m.w0};
    for (auto& w : m.w) p.push_back(&w);
    for (std::size_t i = 0; i < m.v.rows(); ++i) {
        for (std::size_t f = 0; f < m.v.cols(); ++f) p.push_back(&m.v(i, f));
    }
    return p;
}

std::vector<double> flat(const FmGradient& g) {
    std::vector<double> out{g.w0};
    out.insert(out.end(), g.w.begin(), g.w.end());
    for (std::size_t i = 0; i < g.v.rows(); ++i) {
        for (std::size_t f = 0; f < g.v.cols(); ++f) out.push_back(g.v(i, f));
    }
    return out;
}

}  // namespace

TEST_CASE("fm_predict hand values", "[fm]") {
    const FmModel m = two_feature_model();
    CHECK(fm_predict(m, BinaryVector{0, 0}) == m.w0);
    CHECK_THAT(fm_predict(m, BinaryVector{1, 1}), WithinAbs(8.0, 1e-12));
    CHECK_THAT(fm_predict(m, BinaryVector{1, 0}), WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(fm_predict(m, BinaryVector{1}), DimensionError);
}

TEST_CASE("fast prediction equals the pairwise sum", "[fm][property]") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % 64;
        const std::size_t k = 1 + rng() % 8;
        const FmModel m = oracle::random_fm(n, k, rng);
        const BinaryVector x = oracle::random_bits(n, rng);
        REQUIRE_THAT(fm_predict(m, x), WithinAbs(oracle::fm_value(m, x), 1e-9));
    }
}

TEST_CASE("batch prediction matches the serial reference", "[fm]") {
    std::mt19937_64 rng(4);
    const FmModel m = oracle::random_fm(20, 4, rng);
    std::vector<BinaryVector> xs;
    for (int r = 0; r < 500; ++r) xs.push_back(oracle::random_bits(20, rng));
    const auto par = fm_predict_batch(m, xs);
    const auto ser = fm_predict_batch_serial(m, xs);
    REQUIRE(par == ser);
    for (std::size_t r = 0; r < xs.size(); ++r) REQUIRE(par[r] == fm_predict(m, xs[r]));
}

TEST_CASE("fm_to_qubo coefficients and exhaustive equality", "[fm]") {
    const QuboModel q = fm_to_qubo(two_feature_model());
    CHECK(q.quadratic(0, 1) == 6.0);
    CHECK(q.linear(0) == 1.0);
    CHECK(q.linear(1) == 1.0);

    FmModel zero;
    zero.w0 = 1.25;
    zero.w.assign(3, 0.0);
    zero.v = LatentMatrix(3, 2);
    const QuboModel qz = fm_to_qubo(zero);
    CHECK(qz.constant() == 1.25);
    CHECK(qz.num_interactions() == 0);

    std::mt19937_64 rng(8);
    for (std::size_t n : {1, 5, 12}) {
        const FmModel m = oracle::random_fm(n, 3, rng);
        const QuboModel qm = fm_to_qubo(m);
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
            const BinaryVector x = oracle::bits_of(code, n);
            REQUIRE_THAT(qubo_energy(qm, x), WithinAbs(fm_predict(m, x), 1e-9));
        }
    }
}

TEST_CASE("fm_gradient matches central finite differences", "[fm][property]") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 3 + t;
        const std::size_t k = 1 + t % 4;
        FmModel m = oracle::random_fm(n, k, rng, 0.5);
        Dataset batch;
        for (int r = 0; r < 7; ++r) batch.push_back(oracle::random_bits(n, rng), std::normal_distribution<>(0, 2)(rng));
        const double beta1 = t % 2 ? 0.03 : 0.0;
        const double beta2 = t % 3 ? 0.01 : 0.0;
        const auto analytic = flat(fm_gradient(m, batch, beta1, beta2));
        auto p = params(m);
        REQUIRE(analytic.size() == p.size());
        const double h = 1e-5;
        for (std::size_t c = 0; c < p.size(); ++c) {
            const double keep = *p[c];
            *p[c] = keep + h;
            const double up = fm_objective(m, batch, beta1, beta2);
            *p[c] = keep - h;
            const double down = fm_objective(m, batch, beta1, beta2);
            *p[c] = keep;
            INFO("config " << t << " coordinate " << c);
            REQUIRE(rel_err(analytic[c], (up - down) / (2 * h)) < 1e-4);
        }
    }
}

TEST_CASE("fm_gradient special cases", "[fm]") {
    std::mt19937_64 rng(2);
    const FmModel m = oracle::random_fm(5, 2, rng);
    const Dataset exact = planted_data(m, 10, rng);
    const FmGradient g = fm_gradient(m, exact);
    CHECK_THAT(g.w0, WithinAbs(0.0, 1e-12));
    for (double w : g.w) CHECK_THAT(w, WithinAbs(0.0, 1e-12));
    for (double v : g.v.values()) CHECK_THAT(v, WithinAbs(0.0, 1e-12));

    Dataset one;
    one.push_back(BinaryVector{1, 0, 1, 0, 0}, 3.0);
    const double residual = 3.0 - fm_predict(m, one.inputs[0]);
    CHECK_THAT(fm_gradient(m, one).w0, WithinAbs(-2.0 * residual, 1e-12));

    FmModel z = m;
    z.w.assign(5, 0.0);
    const FmGradient gz = fm_gradient(z, exact, 1.0, 0.0);
    const FmGradient g0 = fm_gradient(z, exact, 0.0, 0.0);
    for (std::size_t i = 0; i < 5; ++i) CHECK(gz.w[i] == g0.w[i]);
}

TEST_CASE("fm_train recovers a bias-only optimum", "[fm][train]") {
    Dataset d;
    d.push_back(BinaryVector{0, 0, 0}, 2.5);
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.epochs = 2000;
    cfg.tolerance = 0.0;
    const FmModel m = fm_train(d, cfg);
    CHECK_THAT(m.w0, WithinAbs(2.5, 1e-3));
}

TEST_CASE("fm_train recovers a planted model", "[fm][train]") {
    std::mt19937_64 rng(31);
    const FmModel planted = oracle::random_fm(8, 2, rng, 0.7);
    const Dataset d = planted_data(planted, 200, rng);
    TrainConfig cfg;
    cfg.latent_dim = 2;
    cfg.learning_rate = 0.02;
    cfg.epochs = 3000;
    cfg.batch_size = 16;
    cfg.init_scale = 0.1;
    cfg.tolerance = 1e-10;
    cfg.patience = 50;
    cfg.seed = 3;
    TrainReport report;
    const FmModel m = fm_train(d, cfg, std::nullopt, &report);
    CHECK(fm_mse(m, d) < 1e-2);
    CHECK(report.final_loss <= report.initial_loss);

    double mse = 0.0;
    for (std::uint64_t code = 0; code < 256; ++code) {
        const BinaryVector x = oracle::bits_of(code, 8);
        const double e = fm_predict(m, x) - oracle::fm_value(planted, x);
        mse += e * e / 256.0;
    }
    CHECK(mse < 1e-2);
}

TEST_CASE("fm_train is deterministic and never ends above its start", "[fm][train]") {
    std::mt19937_64 rng(12);
    Dataset d;
    for (int r = 0; r < 60; ++r) d.push_back(oracle::random_bits(6, rng), std::normal_distribution<>(0, 1)(rng));
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 99;
    TrainReport ra, rb;
    const FmModel a = fm_train(d, cfg, std::nullopt, &ra);
    const FmModel b = fm_train(d, cfg, std::nullopt, &rb);
    CHECK(a.w0 == b.w0);
    CHECK(a.w == b.w);
    CHECK(a.v.values() == b.v.values());
    CHECK(ra.final_loss <= ra.initial_loss);
    CHECK(ra.final_loss == fm_objective(a, d, cfg.beta1, cfg.beta2));

    cfg.seed = 100;
    const FmModel c = fm_train(d, cfg);
    CHECK(c.v.values() != a.v.values());
}

TEST_CASE("fm_train L1 behaviour", "[fm][train]") {
    std::mt19937_64 rng(6);
    const FmModel planted = oracle::random_fm(6, 2, rng);
    const Dataset d = planted_data(planted, 80, rng);
    TrainConfig cfg;
    cfg.epochs = 300;
    cfg.learning_rate = 0.01;
    cfg.beta1 = 1e3;
    const FmModel big = fm_train(d, cfg);
    for (double w : big.w) CHECK(std::abs(w) < 1e-3);

    double previous = std::numeric_limits<double>::infinity();
    for (double b1 : {0.0, 0.05, 0.5}) {
        cfg.beta1 = b1;
        const FmModel m = fm_train(d, cfg);
        double l1 = 0.0;
        for (double w : m.w) l1 += std::abs(w);
        CHECK(l1 <= previous + 1e-6);
        previous = l1;
    }
}

TEST_CASE("fm_train errors", "[fm][train]") {
    CHECK_THROWS_AS(fm_train(Dataset{}, TrainConfig{}), ValidationError);

    Dataset ragged;
    ragged.push_back(BinaryVector{1, 0}, 1.0);
    ragged.push_back(BinaryVector{1}, 1.0);
    CHECK_THROWS_AS(fm_train(ragged, TrainConfig{}), ValidationError);

    TrainConfig bad;
    bad.learning_rate = 0.0;
    Dataset d;
    d.push_back(BinaryVector{1, 1}, 1.0);
    CHECK_THROWS_AS(fm_train(d, bad), ValidationError);

    Dataset wild;
    for (int r = 0; r < 8; ++r) wild.push_back(BinaryVector(10, 1), 1e6 * (r % 2 ? 1 : -1));
    TrainConfig diverge;
    diverge.learning_rate = 1e3;
    diverge.init_scale = 10.0;
    diverge.tolerance = 0.0;
    CHECK_THROWS_AS(fm_train(wild, diverge), TrainingError);
}

TEST_CASE("warm start continues from the given parameters", "[fm][train]") {
    std::mt19937_64 rng(15);
    const FmModel planted = oracle::random_fm(5, 2, rng);
    const Dataset d = planted_data(planted, 50, rng);
    TrainConfig cfg;
    cfg.latent_dim = 2;
    cfg.epochs = 1;
    cfg.learning_rate = 1e-12;
    const FmModel m = fm_train(d, cfg, planted);
    CHECK_THAT(m.w0, WithinAbs(planted.w0, 1e-9));
    cfg.latent_dim = 3;
    CHECK_THROWS_AS(fm_train(d, cfg, planted), DimensionError);
}

TEST_CASE("FM serialization roundtrip", "[fm][io]") {
    std::mt19937_64 rng(19);
    const FmModel m = oracle::random_fm(4, 3, rng);
    std::stringstream buf;
    save_model(buf, m);
    CHECK(buf.str().find("fmqubos.fm/1") != std::string::npos);
    const FmModel back = load_fm_model(buf);
    CHECK(back.w0 == m.w0);
    CHECK(back.w == m.w);
    CHECK(back.v.values() == m.v.values());

    std::stringstream wrong("{\"format\": \"something/9\"}");
    CHECK_THROWS_AS(load_fm_model(wrong), ParseError);
}

// -- HOFM -------------------------------------------------------------------

TEST_CASE("hofm_predict hand values", "[hofm]") {
    HofmModel m;
    m.w0 = 0.5;
    m.w.assign(3, 0.0);
    m.v2 = LatentMatrix(3, 1);
    m.v3 = LatentMatrix(3, 1);
    m.v3(0, 0) = 1.0;
    m.v3(1, 0) = 2.0;
    m.v3(2, 0) = 3.0;
    CHECK(hofm_predict(m, BinaryVector{0, 0, 0}) == 0.5);
    CHECK_THAT(hofm_predict(m, BinaryVector{1, 1, 1}), WithinAbs(6.5, 1e-12));
    CHECK_THAT(hofm_predict(m, BinaryVector{1, 1, 0}), WithinAbs(0.5, 1e-12));
    CHECK(hofm_to_hubo(m).coefficient({0, 1, 2}) == 6.0);
}

TEST_CASE("HOFM with zero cubic block is an FM", "[hofm]") {
    std::mt19937_64 rng(21);
    HofmModel h = oracle::random_hofm(6, 3, rng);
    h.v3 = LatentMatrix(6, 3);
    FmModel f;
    f.w0 = h.w0;
    f.w = h.w;
    f.v = h.v2;
    for (int t = 0; t < 30; ++t) {
        const BinaryVector x = oracle::random_bits(6, rng);
        REQUIRE_THAT(hofm_predict(h, x), WithinAbs(fm_predict(f, x), 1e-9));
    }
    const HuboModel hubo = hofm_to_hubo(h);
    const QuboModel qubo = fm_to_qubo(f);
    CHECK(hubo.max_order() <= 2);
    CHECK(hubo.constant() == qubo.constant());
    for (const auto& [term, c] : hubo.terms()) {
        if (term.size() == 1) CHECK(c == qubo.linear(term[0]));
        if (term.size() == 2) CHECK(c == qubo.quadratic(term[0], term[1]));
    }
}

TEST_CASE("hofm_predict and hofm_to_hubo match the explicit sums", "[hofm][property]") {
    std::mt19937_64 rng(27);
    for (std::size_t n : {3, 6, 10}) {
        const HofmModel m = oracle::random_hofm(n, 2, rng);
        const HuboModel h = hofm_to_hubo(m);
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
            const BinaryVector x = oracle::bits_of(code, n);
            const double expected = oracle::hofm_value(m, x);
            REQUIRE_THAT(hofm_predict(m, x), WithinAbs(expected, 1e-9));
            REQUIRE_THAT(hubo_energy(h, x), WithinAbs(expected, 1e-9));
        }
    }
}

TEST_CASE("hofm_gradient matches central finite differences", "[hofm][property]") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 5; ++t) {
        const std::size_t n = 4 + t;
        HofmModel m = oracle::random_hofm(n, 2, rng, 0.5);
        Dataset batch;
        for (int r = 0; r < 6; ++r) batch.push_back(oracle::random_bits(n, rng), std::normal_distribution<>(0, 1)(rng));
        const double beta2 = 0.02;
        const FmGradient g = hofm_gradient(m, batch, 0.0, beta2);
        std::vector<std::pair<double*, double>> coords{{&m.w0, g.w0}};
        for (std::size_t i = 0; i < n; ++i) coords.push_back({&m.w[i], g.w[i]});
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t f = 0; f < 2; ++f) {
                coords.push_back({&m.v2(i, f), g.v(i, f)});
                coords.push_back({&m.v3(i, f), g.v3(i, f)});
            }
        }
        const double h = 1e-5;
        for (auto [p, analytic] : coords) {
            const double keep = *p;
            *p = keep + h;
            const double up = hofm_objective(m, batch, 0.0, beta2);
            *p = keep - h;
            const double down = hofm_objective(m, batch, 0.0, beta2);
            *p = keep;
            REQUIRE(rel_err(analytic, (up - down) / (2 * h)) < 1e-4);
        }
    }
}

TEST_CASE("hofm_train lowers the loss on cubic data", "[hofm][train]") {
    std::mt19937_64 rng(33);
    const HofmModel planted = oracle::random_hofm(6, 2, rng, 0.7);
    Dataset d;
    for (int r = 0; r < 64; ++r) {
        BinaryVector x = oracle::bits_of(static_cast<std::uint64_t>(r), 6);
        const double y = oracle::hofm_value(planted, x);
        d.push_back(std::move(x), y);
    }
    TrainConfig cfg;
    cfg.latent_dim = 2;
    cfg.learning_rate = 0.01;
    cfg.epochs = 500;
    cfg.init_scale = 0.1;
    TrainReport report;
    const HofmModel m = hofm_train(d, cfg, std::nullopt, &report);
    CHECK(report.final_loss < 0.5 * report.initial_loss);
    const HofmModel again = hofm_train(d, cfg);
    CHECK(m.v3.values() == again.v3.values());
}

TEST_CASE("HOFM serialization roundtrip", "[hofm][io]") {
    std::mt19937_64 rng(37);
    const HofmModel m = oracle::random_hofm(4, 2, rng);
    std::stringstream buf;
    save_model(buf, m);
    const HofmModel back = load_hofm_model(buf);
    CHECK(back.w == m.w);
    CHECK(back.v2.values() == m.v2.values());
    CHECK(back.v3.values() == m.v3.values());
}
