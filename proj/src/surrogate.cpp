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

#include "fmqubos/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <set>
#include <string>

#include "fmqubos/errors.hpp"
#include "fmqubos/seed.hpp"

namespace fmqubos {

void SurrogateConfig::validate() const {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (i_max == 0) throw ValidationError("i_max must be >= 1");
    if (!slack_init.empty() && slack_init.size() != m_slack) {
        throw ValidationError("slack_init has length " + std::to_string(slack_init.size()) +
                              ", expected m = " + std::to_string(m_slack));
    }
    check_binary(slack_init);
    train.validate();
}

BinaryVector SurrogateConfig::initial_slack() const {
    return slack_init.empty() ? BinaryVector(m_slack, 0) : slack_init;
}

Dataset stack_slack(const Dataset& data, std::span<const std::uint8_t> s) {
    Dataset out;
    out.targets = data.targets;
    out.inputs.reserve(data.size());
    for (const auto& x : data.inputs) out.inputs.push_back(stack_slack(x, s));
    return out;
}

BinaryVector stack_slack(std::span<const std::uint8_t> x, std::span<const std::uint8_t> s) {
    BinaryVector z(x.begin(), x.end());
    z.insert(z.end(), s.begin(), s.end());
    return z;
}

FqmResult fqm(const Dataset& data, std::span<const std::uint8_t> s, const TrainConfig& train,
              const std::optional<FmModel>& warm_start) {
    data.validate();
    check_binary(s);
    const Dataset stacked = stack_slack(data, s);
    FqmResult out;
    out.model = fm_train(stacked, train, warm_start, &out.report);
    out.qubo = fm_to_qubo(out.model);
    return out;
}

std::size_t count_nonzero_slack(std::span<const std::uint8_t> s) { return popcount(s); }

namespace {

TrainConfig iteration_train(const SurrogateConfig& c, std::size_t i) {
    TrainConfig t = c.train;
    t.seed = derive_seed(c.seed, "train", {i});
    return t;
}

AnnealConfig iteration_anneal(const SurrogateConfig& c, std::size_t i, const OneHotGroups& groups) {
    AnnealConfig a = c.anneal;
    a.seed = derive_seed(c.seed, "anneal", {i});
    a.one_hot_groups = groups;
    return a;
}

bool contains_input(const Dataset& data, std::span<const std::uint8_t> x) {
    return std::any_of(data.inputs.begin(), data.inputs.end(),
                       [&](const BinaryVector& row) { return std::equal(row.begin(), row.end(), x.begin(), x.end()); });
}

/// Random feasible single move away from x that is not yet sampled; x itself
/// if none is found.
BinaryVector perturb(const BinaryVector& x, const OneHotGroups& groups, const Dataset& data, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint8_t> grouped(x.size(), 0);
    for (const auto& g : groups) {
        for (std::size_t i : g) grouped[i] = 1;
    }
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!grouped[i]) free.push_back(i);
    }
    std::vector<std::size_t> movable;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].size() > 1) movable.push_back(g);
    }
    const std::size_t n_moves = free.size() + movable.size();
    if (n_moves == 0) return x;
    std::uniform_int_distribution<std::size_t> pick(0, n_moves - 1);
    for (int attempt = 0; attempt < 100; ++attempt) {
        BinaryVector y = x;
        const std::size_t m = pick(rng);
        if (m < free.size()) {
            y[free[m]] ^= 1U;
        } else {
            const auto& g = groups[movable[m - free.size()]];
            std::uniform_int_distribution<std::size_t> member(0, g.size() - 1);
            for (std::size_t i : g) y[i] = 0;
            y[g[member(rng)]] = 1;
        }
        if (y != x && !contains_input(data, y)) return y;
    }
    return x;
}

void append_sample(Dataset& samples, const BlackBox& box, const BinaryVector& x, double y_true,
                   const SurrogateConfig& config, std::size_t iteration) {
    if (config.skip_duplicates && contains_input(samples, x)) {
        BinaryVector alt = perturb(x, box.one_hot_groups(), samples, derive_seed(config.seed, "perturb", {iteration}));
        const double y_alt = alt == x ? y_true : box.query(alt);
        samples.push_back(std::move(alt), y_alt);
        return;
    }
    samples.push_back(x, y_true);
}

void check_box(const BlackBox& box, std::size_t n_initial, const SurrogateConfig& config) {
    config.validate();
    if (n_initial == 0) throw ValidationError("initial sample size must be >= 1");
    validate_groups(box.one_hot_groups(), box.input_length());
}

}  // namespace

OptimizeResult fmqubo_optimize(const BlackBox& box, std::size_t n_initial, const SurrogateConfig& config) {
    check_box(box, n_initial, config);
    OptimizeResult out;
    out.samples = box.sample(n_initial, derive_seed(config.seed, "bbs"));
    FmModel model = fm_train(out.samples, iteration_train(config, 1));

    for (std::size_t i = 1; i <= config.i_max; ++i) {
        const QuboModel qubo = fm_to_qubo(model);
        const SolveResult sol = solve(qubo, iteration_anneal(config, i, box.one_hot_groups()));
        IterationRecord rec;
        rec.iteration = i;
        rec.n_samples = out.samples.size();
        rec.x = sol.best_x;
        rec.y_model = sol.best_energy;
        rec.y_true = box.query(sol.best_x);
        rec.train_loss = fm_mse(model, out.samples);
        out.trace.push_back(rec);
        out.x = rec.x;
        out.y = rec.y_model;
        out.y_true = rec.y_true;
        if (std::abs(rec.y_true - rec.y_model) < config.epsilon) {
            out.converged = true;
            break;
        }
        append_sample(out.samples, box, rec.x, rec.y_true, config, i);
        if (i < config.i_max) {
            std::optional<FmModel> warm;
            if (config.warm_start) warm = model;
            model = fm_train(out.samples, iteration_train(config, i + 1), warm);
        }
    }
    return out;
}

OptimizeResult fmqubos_optimize(const BlackBox& box, std::size_t n_initial, const SurrogateConfig& config) {
    check_box(box, n_initial, config);
    OptimizeResult out;
    out.samples = box.sample(n_initial, derive_seed(config.seed, "bbs"));
    const std::size_t n = box.input_length();
    BinaryVector s = config.initial_slack();
    std::optional<FmModel> model;

    for (std::size_t i = 1; i <= config.i_max; ++i) {
        std::optional<FmModel> warm;
        if (config.warm_start) warm = model;
        FqmResult step = fqm(out.samples, s, iteration_train(config, i), warm);
        const SolveResult sol = solve(step.qubo, iteration_anneal(config, i, box.one_hot_groups()));

        IterationRecord rec;
        rec.iteration = i;
        rec.n_samples = out.samples.size();
        rec.train_loss = fm_mse(step.model, stack_slack(out.samples, s));
        rec.x.assign(sol.best_x.begin(), sol.best_x.begin() + static_cast<std::ptrdiff_t>(n));
        rec.s.assign(sol.best_x.begin() + static_cast<std::ptrdiff_t>(n), sol.best_x.end());
        rec.y_model = sol.best_energy;
        rec.y_true = box.query(rec.x);
        out.trace.push_back(rec);
        model = std::move(step.model);
        s = rec.s;
        out.x = rec.x;
        out.y = rec.y_model;
        out.y_true = rec.y_true;
        if (std::abs(rec.y_true - rec.y_model) < config.epsilon) {
            out.converged = true;
            break;
        }
        append_sample(out.samples, box, rec.x, rec.y_true, config, i);
    }
    return out;
}

OptimizeResult hofmqubo_optimize(const BlackBox& box, std::size_t n_initial, std::size_t order,
                                 const SurrogateConfig& config) {
    if (order != HofmModel::order) {
        throw ValidationError("HOFM is implemented for order 3 only, got " + std::to_string(order));
    }
    check_box(box, n_initial, config);
    OptimizeResult out;
    out.samples = box.sample(n_initial, derive_seed(config.seed, "bbs"));
    HofmModel model = hofm_train(out.samples, iteration_train(config, 1));

    for (std::size_t i = 1; i <= config.i_max; ++i) {
        const ReductionResult reduced = reduce_hubo_to_qubo(hofm_to_hubo(model));
        const SolveResult sol = solve(reduced.qubo, iteration_anneal(config, i, box.one_hot_groups()));
        IterationRecord rec;
        rec.iteration = i;
        rec.n_samples = out.samples.size();
        rec.x = reduced.original_part(sol.best_x);
        rec.s.assign(sol.best_x.begin() + static_cast<std::ptrdiff_t>(reduced.n_original), sol.best_x.end());
        rec.y_model = sol.best_energy;
        rec.y_true = box.query(rec.x);
        rec.train_loss = hofm_mse(model, out.samples);
        out.trace.push_back(rec);
        out.x = rec.x;
        out.y = rec.y_model;
        out.y_true = rec.y_true;
        if (std::abs(rec.y_true - rec.y_model) < config.epsilon) {
            out.converged = true;
            break;
        }
        append_sample(out.samples, box, rec.x, rec.y_true, config, i);
        if (i < config.i_max) {
            std::optional<HofmModel> warm;
            if (config.warm_start) warm = model;
            model = hofm_train(out.samples, iteration_train(config, i + 1), warm);
        }
    }
    return out;
}

FqexResult fqex(const Dataset& train, const Dataset& test, const OneHotGroups& groups,
                const SurrogateConfig& config) {
    config.validate();
    train.validate();
    test.validate();
    if (train.width() != test.width()) throw DimensionError("train and test widths differ");
    validate_groups(groups, train.width());

    const std::size_t n = train.width();
    BinaryVector s = config.initial_slack();
    FqexResult out;
    std::optional<FmModel> model;

    for (std::size_t i = 1; i <= config.i_max; ++i) {
        std::optional<FmModel> warm;
        if (config.warm_start) warm = model;
        FqmResult step = fqm(train, s, iteration_train(config, i), warm);
        const SolveResult sol = solve(step.qubo, iteration_anneal(config, i, groups));
        s.assign(sol.best_x.begin() + static_cast<std::ptrdiff_t>(n), sol.best_x.end());

        const auto train_pred = fm_predict_batch(step.model, stack_slack(train, s).inputs);
        const auto test_pred = fm_predict_batch(step.model, stack_slack(test, s).inputs);

        IterationRecord rec;
        rec.iteration = i;
        rec.n_samples = train.size();
        rec.x.assign(sol.best_x.begin(), sol.best_x.begin() + static_cast<std::ptrdiff_t>(n));
        rec.s = s;
        rec.y_model = sol.best_energy;
        rec.train_loss = mse_loss(train.targets, train_pred);
        rec.test_mse = mse_loss(test.targets, test_pred);
        try {
            rec.test_pearson = pearson(test.targets, test_pred);
            rec.test_spearman = spearman(test.targets, test_pred);
        } catch (const UndefinedStatisticError&) {
        } catch (const DimensionError&) {
        }
        out.trace.push_back(rec);

        model = std::move(step.model);
        out.loss = rec.train_loss;
        out.test_predictions = test_pred;
        out.test_mse = *rec.test_mse;
        if (rec.test_pearson && rec.test_spearman) {
            out.test_metrics = CaseMetrics{*rec.test_pearson, *rec.test_spearman};
        } else {
            out.test_metrics.reset();
        }
        if (rec.train_loss < config.epsilon) {
            out.loss_converged = true;
            break;
        }
    }
    out.model = std::move(*model);
    out.slack = std::move(s);
    return out;
}

std::map<std::size_t, double> GridResult::nonzero_slack_fraction() const {
    std::map<std::size_t, std::pair<double, std::size_t>> acc;
    for (const auto& c : cells) {
        if (c.m == 0 || !c.converged) continue;
        auto& [sum, count] = acc[c.m];
        sum += static_cast<double>(c.n_nonzero_slack) / static_cast<double>(c.m);
        ++count;
    }
    std::map<std::size_t, double> out;
    for (const auto& [m, sc] : acc) out[m] = sc.first / static_cast<double>(sc.second);
    return out;
}

GridResult grid_test(const Splitter& split, const OneHotGroups& groups, std::span<const double> n1_values,
                     std::span<const std::size_t> m_values, const SurrogateConfig& config,
                     std::uint64_t master_seed) {
    if (n1_values.empty() || m_values.empty()) throw ValidationError("grid ranges must be non-empty");
    std::vector<std::pair<Dataset, Dataset>> splits;
    for (std::size_t a = 0; a < n1_values.size(); ++a) {
        splits.push_back(split(n1_values[a], derive_seed(master_seed, "split", {a})));
    }

    GridResult result;
    result.cells.resize(n1_values.size() * m_values.size());
    std::exception_ptr failure;
    const auto total = static_cast<std::ptrdiff_t>(result.cells.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < total; ++t) {
        const auto idx = static_cast<std::size_t>(t);
        const std::size_t a = idx / m_values.size();
        const std::size_t m = m_values[idx % m_values.size()];
        GridCell& cell = result.cells[idx];
        cell.n1 = n1_values[a];
        cell.m = m;
        cell.seed = master_seed;
        try {
            SurrogateConfig c = config;
            c.m_slack = m;
            c.slack_init.assign(m, 0);
            c.seed = derive_seed(master_seed, "grid-cell", {a, m});
            const FqexResult r = fqex(splits[a].first, splits[a].second, groups, c);
            cell.train_loss = r.loss;
            cell.iterations = r.trace.size();
            cell.n_nonzero_slack = count_nonzero_slack(r.slack);
            if (r.test_metrics) {
                cell.pearson = r.test_metrics->pearson;
                cell.spearman = r.test_metrics->spearman;
                cell.converged = true;
            }
        } catch (const TrainingError&) {
            cell.converged = false;
        } catch (...) {
#pragma omp critical(fmqubos_grid_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

GridResult grid_test(const Splitter& split, const OneHotGroups& groups, std::pair<std::size_t, std::size_t> n_range,
                     std::pair<std::size_t, std::size_t> m_range, const SurrogateConfig& config,
                     std::uint64_t master_seed) {
    if (n_range.first > n_range.second || m_range.first > m_range.second) {
        throw ValidationError("grid range bounds are reversed");
    }
    std::vector<double> ns;
    for (std::size_t v = n_range.first; v <= n_range.second; ++v) ns.push_back(static_cast<double>(v));
    std::vector<std::size_t> ms;
    for (std::size_t v = m_range.first; v <= m_range.second; ++v) ms.push_back(v);
    return grid_test(split, groups, ns, ms, config, master_seed);
}

}  // namespace fmqubos
