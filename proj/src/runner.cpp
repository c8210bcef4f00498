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

#include "fmqubos/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "fmqubos/binopt_io.hpp"
#include "fmqubos/errors.hpp"
#include "fmqubos/seed.hpp"

namespace fmqubos {

namespace {

// -- value parsing ----------------------------------------------------------

std::vector<std::string> tokens(const std::vector<std::string>& values) {
    std::vector<std::string> out;
    for (const auto& v : values) {
        std::string cur;
        for (char c : v) {
            if (c == ',' || c == ' ' || c == '\t' || c == '[' || c == ']') {
                if (!cur.empty()) out.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) out.push_back(std::move(cur));
    }
    return out;
}

std::string single(const std::string& key, const std::vector<std::string>& values) {
    if (values.size() != 1) throw ConfigError(key + ": expected one value", {key});
    return values.front();
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if constexpr (std::is_floating_point_v<T>) {
        if (text == "inf" || text == "+inf") return std::numeric_limits<T>::infinity();
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError(key + ": cannot parse '" + text + "'", {key});
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + text + "'", {key});
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::vector<std::string>& values) {
    std::vector<T> out;
    for (const auto& t : tokens(values)) out.push_back(parse_number<T>(key, t));
    if (out.empty()) throw ConfigError(key + ": empty list", {key});
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string fmt_exact(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::ostringstream os;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ',';
        if constexpr (std::is_floating_point_v<T>) {
            os << fmt_exact(values[i]);
        } else {
            os << values[i];
        }
    }
    return os.str();
}

std::string bits(std::span<const std::uint8_t> x) {
    std::string s;
    s.reserve(x.size());
    for (auto b : x) s.push_back(b ? '1' : '0');
    return s;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    return out + "\"";
}

// -- key registry -----------------------------------------------------------

using Values = std::vector<std::string>;

struct Field {
    std::function<void(RunConfig&, const std::string&, const Values&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field number_field(T RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const Values& v) { c.*member = parse_number<T>(k, single(k, v)); },
            [member](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return fmt_exact(c.*member);
                } else {
                    return std::to_string(c.*member);
                }
            }};
}

template <class T>
Field train_field(T TrainConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const Values& v) {
                c.train.*member = parse_number<T>(k, single(k, v));
            },
            [member](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return fmt_exact(c.train.*member);
                } else {
                    return std::to_string(c.train.*member);
                }
            }};
}

template <class T>
Field synthetic_field(T SyntheticSpec::*member) {
    return {[member](RunConfig& c, const std::string& k, const Values& v) {
                c.synthetic.*member = parse_number<T>(k, single(k, v));
            },
            [member](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return fmt_exact(c.synthetic.*member);
                } else {
                    return std::to_string(c.synthetic.*member);
                }
            }};
}

Field string_field(std::string RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const Values& v) { c.*member = single(k, v); },
            [member](const RunConfig& c) { return c.*member; }};
}

Field path_field(std::filesystem::path RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const Values& v) { c.*member = single(k, v); },
            [member](const RunConfig& c) { return (c.*member).generic_string(); }};
}

Field bool_field(bool RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const Values& v) { c.*member = parse_bool(k, single(k, v)); },
            [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Field temperature_field(std::optional<double> AnnealConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const Values& v) {
                const std::string s = single(k, v);
                if (s == "auto" || s.empty()) {
                    c.anneal.*member = std::nullopt;
                } else {
                    c.anneal.*member = parse_number<double>(k, s);
                }
            },
            [member](const RunConfig& c) {
                const auto& t = c.anneal.*member;
                return t ? fmt_exact(*t) : std::string("auto");
            }};
}

const std::map<std::string, Field>& registry() {
    static const std::map<std::string, Field> fields = [] {
        std::map<std::string, Field> f;
        f["run.scenario"] = string_field(&RunConfig::scenario);
        f["run.data"] = path_field(&RunConfig::data);
        f["run.output"] = path_field(&RunConfig::output);
        f["run.seeds"] = {[](RunConfig& c, const std::string& k, const Values& v) {
                              c.seeds = parse_list<std::uint64_t>(k, v);
                          },
                          [](const RunConfig& c) { return join(c.seeds); }};
        f["run.cell_line"] = string_field(&RunConfig::cell_line);
        f["run.max_cases"] = number_field(&RunConfig::max_cases);

        f["grid.n1"] = {[](RunConfig& c, const std::string& k, const Values& v) { c.n1 = parse_list<double>(k, v); },
                        [](const RunConfig& c) { return join(c.n1); }};
        f["grid.m"] = {[](RunConfig& c, const std::string& k, const Values& v) {
                           c.m = parse_list<std::size_t>(k, v);
                       },
                       [](const RunConfig& c) { return join(c.m); }};

        f["synthetic.n_groups"] = synthetic_field(&SyntheticSpec::n_groups);
        f["synthetic.group_size"] = synthetic_field(&SyntheticSpec::group_size);
        f["synthetic.noise_sd"] = synthetic_field(&SyntheticSpec::noise_sd);
        f["synthetic.seed"] = synthetic_field(&SyntheticSpec::seed);
        f["synthetic.planted_orders"] = {[](RunConfig& c, const std::string& k, const Values& v) {
                                             c.synthetic.planted_orders = parse_list<std::size_t>(k, v);
                                         },
                                         [](const RunConfig& c) { return join(c.synthetic.planted_orders); }};
        f["synthetic.coefficient_scale"] = {[](RunConfig& c, const std::string& k, const Values& v) {
                                                c.synthetic.coefficient_scale = parse_list<double>(k, v);
                                            },
                                            [](const RunConfig& c) { return join(c.synthetic.coefficient_scale); }};
        f["synthetic.n_test"] = number_field(&RunConfig::n_test);

        f["train.latent_dim"] = train_field(&TrainConfig::latent_dim);
        f["train.learning_rate"] = train_field(&TrainConfig::learning_rate);
        f["train.beta1"] = train_field(&TrainConfig::beta1);
        f["train.beta2"] = train_field(&TrainConfig::beta2);
        f["train.epochs"] = train_field(&TrainConfig::epochs);
        f["train.batch_size"] = train_field(&TrainConfig::batch_size);
        f["train.init_scale"] = train_field(&TrainConfig::init_scale);
        f["train.tolerance"] = train_field(&TrainConfig::tolerance);
        f["train.patience"] = train_field(&TrainConfig::patience);

        f["anneal.num_reads"] = {[](RunConfig& c, const std::string& k, const Values& v) {
                                     c.anneal.num_reads = parse_number<std::size_t>(k, single(k, v));
                                 },
                                 [](const RunConfig& c) { return std::to_string(c.anneal.num_reads); }};
        f["anneal.sweeps_per_read"] = {[](RunConfig& c, const std::string& k, const Values& v) {
                                           c.anneal.sweeps_per_read = parse_number<std::size_t>(k, single(k, v));
                                       },
                                       [](const RunConfig& c) { return std::to_string(c.anneal.sweeps_per_read); }};
        f["anneal.t_initial"] = temperature_field(&AnnealConfig::t_initial);
        f["anneal.t_final"] = temperature_field(&AnnealConfig::t_final);

        f["surrogate.i_max"] = number_field(&RunConfig::i_max);
        f["surrogate.epsilon"] = number_field(&RunConfig::epsilon);
        f["surrogate.warm_start"] = bool_field(&RunConfig::warm_start);
        f["surrogate.skip_duplicates"] = bool_field(&RunConfig::skip_duplicates);

        f["optimize.optimizer"] = string_field(&RunConfig::optimizer);
        f["optimize.blackbox"] = string_field(&RunConfig::blackbox);
        f["optimize.model"] = path_field(&RunConfig::model);
        f["optimize.n_initial"] = number_field(&RunConfig::n_initial);
        f["optimize.order"] = number_field(&RunConfig::order);
        f["optimize.m_slack"] = number_field(&RunConfig::m_slack);
        f["optimize.case"] = number_field(&RunConfig::case_index);
        return f;
    }();
    return fields;
}

}  // namespace

// -- RunConfig --------------------------------------------------------------

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : registry()) out.push_back(k);
    return out;
}

void RunConfig::set(const std::string& key, const std::vector<std::string>& values) {
    const auto it = registry().find(key);
    if (it == registry().end()) throw ConfigError("unknown config key: " + key, {key});
    it->second.set(*this, key, values);
}

void RunConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("expected section.key=value, got '" + assignment + "'", {assignment});
    }
    set(assignment.substr(0, eq), {assignment.substr(eq + 1)});
}

void RunConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what, {key}); };
    if (scenario != "synthetic" && scenario != "1" && scenario != "2") {
        fail("run.scenario", "must be synthetic, 1 or 2, got '" + scenario + "'");
    }
    if (seeds.empty()) fail("run.seeds", "must be non-empty");
    if (n1.empty()) fail("grid.n1", "must be non-empty");
    if (m.empty()) fail("grid.m", "must be non-empty");
    for (double v : n1) {
        if (scenario == "1") {
            if (v < 0 || v != std::floor(v) || v > static_cast<double>(scenario1_extra_capacity())) {
                fail("grid.n1", "n_extra must be an integer in [0, " + std::to_string(scenario1_extra_capacity()) +
                                        "], got " + fmt(v));
            }
        } else if (scenario == "2") {
            if (!(v > 0.0 && v < 1.0)) fail("grid.n1", "missing ratio must lie in (0, 1), got " + fmt(v));
        } else if (v < 1 || v != std::floor(v)) {
            fail("grid.n1", "training size must be a positive integer, got " + fmt(v));
        }
    }
    if (!(epsilon > 0.0)) fail("surrogate.epsilon", "must be positive");
    if (i_max == 0) fail("surrogate.i_max", "must be >= 1");
    if (anneal.num_reads == 0) fail("anneal.num_reads", "must be >= 1");
    if (anneal.sweeps_per_read == 0) fail("anneal.sweeps_per_read", "must be >= 1");
    if (optimizer != "fmqubo" && optimizer != "hofmqubo" && optimizer != "fmqubos") {
        fail("optimize.optimizer", "unknown optimizer '" + optimizer + "' (fmqubo, hofmqubo, fmqubos)");
    }
    if (blackbox != "synthetic" && blackbox != "table" && blackbox != "hubo") {
        fail("optimize.blackbox", "must be synthetic, table or hubo, got '" + blackbox + "'");
    }
    if (n_initial == 0) fail("optimize.n_initial", "must be >= 1");
    if (order != 3) fail("optimize.order", "only order 3 is supported");
    try {
        train.validate();
    } catch (const std::invalid_argument& e) {
        fail("train", e.what());
    }
    try {
        synthetic.validate();
    } catch (const std::invalid_argument& e) {
        fail("synthetic", e.what());
    }
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& [k, f] : registry()) {
        if (k != "run.output") out += k + "=" + f.get(*this) + "\n";
    }
    return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

std::string RunConfig::hash_hex() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash();
    return os.str();
}

SurrogateConfig RunConfig::surrogate() const {
    SurrogateConfig s;
    s.m_slack = m_slack;
    s.i_max = i_max;
    s.epsilon = epsilon;
    s.train = train;
    s.anneal = anneal;
    s.warm_start = warm_start;
    s.skip_duplicates = skip_duplicates;
    return s;
}

RunConfig parse_run_config(std::istream& in, RunConfig base) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    std::vector<std::string> unknown;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        const std::string key = item.fullname();
        if (!registry().contains(key)) {
            unknown.push_back(key);
            continue;
        }
        base.set(key, item.inputs);
    }
    if (!unknown.empty()) {
        std::string what = "unknown config keys:";
        for (const auto& k : unknown) what += " " + k;
        throw ConfigError(what, unknown);
    }
    return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_run_config(in, std::move(base));
}

// -- run-scenario -----------------------------------------------------------

namespace {

struct Case {
    std::string label;
    Splitter split;
    OneHotGroups groups;
};

std::vector<Case> synthetic_cases(const RunConfig& config, std::uint64_t rep_seed) {
    SyntheticSpec spec = config.synthetic;
    spec.seed = derive_seed(config.synthetic.seed, "synthetic-case", {rep_seed});
    std::shared_ptr<const PolynomialBlackBox> box = make_synthetic_blackbox(spec);
    const std::size_t n_test = config.n_test;
    Case c;
    c.label = "synthetic";
    c.groups = box->one_hot_groups();
    c.split = [box, n_test](double n1, std::uint64_t seed) {
        const auto n_train = static_cast<std::size_t>(n1);
        Dataset all = box->sample(n_train + n_test, seed);
        Dataset train;
        Dataset test;
        for (std::size_t r = 0; r < all.size(); ++r) {
            (r < n_train ? train : test).push_back(std::move(all.inputs[r]), all.targets[r]);
        }
        return std::make_pair(std::move(train), std::move(test));
    };
    return {c};
}

std::vector<Case> scenario1_cases(const RunConfig& config) {
    const auto records = load_records(config.data, Scenario::one);
    auto matrices = group_matrices(records);
    if (config.max_cases > 0 && matrices.size() > config.max_cases) matrices.resize(config.max_cases);
    const auto encoder = std::make_shared<const RecordEncoder>(RecordEncoder::scenario1());
    std::vector<Case> out;
    for (auto& mat : matrices) {
        Case c;
        c.label = mat.drug_a + "|" + mat.drug_b + "|" + mat.cell_line;
        c.groups = encoder->spec().one_hot_groups();
        auto shared = std::make_shared<const DoseResponseMatrix>(std::move(mat));
        c.split = [shared, encoder](double n1, std::uint64_t seed) {
            const CellSplit s = split_scenario1(static_cast<std::size_t>(n1), seed);
            return std::make_pair(cells_to_dataset(*shared, s.train, *encoder),
                                  cells_to_dataset(*shared, s.test, *encoder));
        };
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Case> scenario2_cases(const RunConfig& config) {
    const auto records = load_records(config.data, Scenario::two);
    const auto encoder = std::make_shared<const RecordEncoder>(RecordEncoder::scenario2(records));
    std::vector<std::string> lines = cell_lines(records);
    if (!config.cell_line.empty()) {
        if (std::find(lines.begin(), lines.end(), config.cell_line) == lines.end()) {
            throw ValidationError("cell line '" + config.cell_line + "' not in " + config.data.string());
        }
        lines = {config.cell_line};
    }
    std::vector<Case> out;
    for (const auto& line : lines) {
        Case c;
        c.label = line;
        c.groups = encoder->spec().one_hot_groups();
        auto subset = std::make_shared<const std::vector<ResponseRecord>>(filter_cell_line(records, line));
        c.split = [subset, encoder](double ratio, std::uint64_t seed) {
            const RecordSplit s = split_scenario2(*subset, ratio, seed);
            return std::make_pair(encoder->encode_all(symmetrize(s.train)), encoder->encode_all(s.test));
        };
        out.push_back(std::move(c));
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("error writing " + path.string());
}

}  // namespace

std::vector<ScenarioRow> run_scenario(const RunConfig& config, std::ostream& log) {
    config.validate();
    std::vector<Case> fixed;
    if (config.scenario == "1") fixed = scenario1_cases(config);
    if (config.scenario == "2") fixed = scenario2_cases(config);

    const SurrogateConfig base = config.surrogate();
    std::vector<ScenarioRow> rows;
    for (std::uint64_t rep : config.seeds) {
        const std::vector<Case> cases = config.scenario == "synthetic" ? synthetic_cases(config, rep) : fixed;
        for (std::size_t ci = 0; ci < cases.size(); ++ci) {
            const Case& c = cases[ci];
            const GridResult grid = grid_test(c.split, c.groups, config.n1, config.m, base,
                                              derive_seed(rep, "case", {ci}));
            for (const auto& cell : grid.cells) rows.push_back({config.scenario, c.label, rep, cell});
            log << "seed " << rep << " case " << ci + 1 << "/" << cases.size() << " (" << c.label << ") done\n";
        }
    }
    write_file(config.output, [&](std::ostream& out) { write_grid_csv(out, config, rows); });
    return rows;
}

void write_grid_csv(std::ostream& out, const RunConfig& config, const std::vector<ScenarioRow>& rows) {
    out << "# config_hash=" << config.hash_hex() << "\n";
    out << "scenario,case," << (config.scenario == "2" ? "missing_ratio" : "n_1")
        << ",m,seed,pearson,spearman,train_loss,iterations,n_nonzero_slack,converged\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << csv_field(r.case_label) << ',' << fmt(r.cell.n1) << ',' << r.cell.m << ','
            << r.seed << ',' << fmt(r.cell.pearson) << ',' << fmt(r.cell.spearman) << ',' << fmt(r.cell.train_loss)
            << ',' << r.cell.iterations << ',' << r.cell.n_nonzero_slack << ','
            << (r.cell.converged ? "true" : "false") << '\n';
    }
}

void print_summary(std::ostream& out, const std::vector<ScenarioRow>& rows) {
    struct Acc {
        std::vector<CaseMetrics> metrics;
        std::vector<std::uint8_t> converged;
        double slack_sum = 0.0;
        std::size_t slack_count = 0;
    };
    std::map<std::pair<double, std::size_t>, Acc> groups;
    for (const auto& r : rows) {
        Acc& a = groups[{r.cell.n1, r.cell.m}];
        a.metrics.push_back({r.cell.pearson, r.cell.spearman});
        a.converged.push_back(r.cell.converged);
        if (r.cell.converged && r.cell.m > 0) {
            a.slack_sum += static_cast<double>(r.cell.n_nonzero_slack) / static_cast<double>(r.cell.m);
            ++a.slack_count;
        }
    }
    for (const auto& [key, a] : groups) {
        out << "n_1=" << fmt(key.first) << " m=" << key.second;
        const auto flags = std::make_unique<bool[]>(a.converged.size());
        std::copy(a.converged.begin(), a.converged.end(), flags.get());
        try {
            const MetricSummary s = summarize(a.metrics, std::span<const bool>(flags.get(), a.converged.size()));
            out << " cases=" << s.n_cases << " failed=" << s.n_failed << " pearson=" << fmt(s.pearson_mean) << "+-"
                << fmt(s.pearson_std) << " spearman=" << fmt(s.spearman_mean) << "+-" << fmt(s.spearman_std);
        } catch (const UndefinedStatisticError&) {
            out << " cases=0 failed=" << a.metrics.size() << " pearson=undefined spearman=undefined";
        }
        if (a.slack_count) out << " nonzero_slack=" << fmt(a.slack_sum / static_cast<double>(a.slack_count));
        out << '\n';
    }
}

// -- run-optimize -----------------------------------------------------------

namespace {

std::unique_ptr<BlackBox> make_box(const RunConfig& config) {
    if (config.blackbox == "synthetic") return make_synthetic_blackbox(config.synthetic);
    if (config.blackbox == "hubo") {
        if (config.model.empty()) throw ConfigError("optimize.model: required for blackbox = hubo", {"optimize.model"});
        return std::make_unique<PolynomialBlackBox>(read_hubo_file(config.model), OneHotGroups{});
    }
    if (config.scenario == "1") {
        const auto matrices = group_matrices(load_records(config.data, Scenario::one));
        if (config.case_index >= matrices.size()) {
            throw ConfigError("optimize.case: index " + std::to_string(config.case_index) + " but only " +
                                      std::to_string(matrices.size()) + " matrices",
                              {"optimize.case"});
        }
        const auto& mat = matrices[config.case_index];
        std::vector<ResponseRecord> recs;
        for (std::size_t a = 0; a < kScenario1Levels; ++a) {
            for (std::size_t b = 0; b < kScenario1Levels; ++b) recs.push_back(mat.record({a, b}));
        }
        return make_table_blackbox(recs, RecordEncoder::scenario1());
    }
    if (config.scenario == "2") {
        const auto records = load_records(config.data, Scenario::two);
        const auto lines = cell_lines(records);
        const std::string line = config.cell_line.empty() ? lines.front() : config.cell_line;
        const auto subset = filter_cell_line(records, line);
        if (subset.empty()) throw ValidationError("cell line '" + line + "' not in " + config.data.string());
        return make_table_blackbox(subset, RecordEncoder::scenario2(records));
    }
    throw ConfigError("optimize.blackbox = table needs run.scenario 1 or 2", {"optimize.blackbox"});
}

}  // namespace

std::vector<OptimizeRun> run_optimize(const RunConfig& config, std::ostream& log) {
    config.validate();
    const std::unique_ptr<BlackBox> box = make_box(config);
    std::vector<OptimizeRun> runs;
    for (std::uint64_t seed : config.seeds) {
        SurrogateConfig sc = config.surrogate();
        sc.seed = seed;
        OptimizeRun run{seed, {}};
        if (config.optimizer == "fmqubo") {
            run.result = fmqubo_optimize(*box, config.n_initial, sc);
        } else if (config.optimizer == "hofmqubo") {
            run.result = hofmqubo_optimize(*box, config.n_initial, config.order, sc);
        } else {
            run.result = fmqubos_optimize(*box, config.n_initial, sc);
        }
        const auto& r = run.result;
        log << config.optimizer << " seed " << seed << ": x=" << bits(r.x) << " y=" << fmt(r.y)
            << " y_true=" << fmt(r.y_true) << " iterations=" << r.trace.size()
            << " converged=" << (r.converged ? "true" : "false") << '\n';
        runs.push_back(std::move(run));
    }
    write_file(config.output, [&](std::ostream& out) { write_trace_csv(out, config, runs); });
    return runs;
}

void write_trace_csv(std::ostream& out, const RunConfig& config, const std::vector<OptimizeRun>& runs) {
    out << "# config_hash=" << config.hash_hex() << "\n";
    out << "optimizer,seed,iteration,n_samples,x,s,y_model,y_true,train_loss,converged\n";
    for (const auto& run : runs) {
        for (const auto& rec : run.result.trace) {
            const bool conv = std::abs(rec.y_true - rec.y_model) < config.epsilon;
            out << config.optimizer << ',' << run.seed << ',' << rec.iteration << ',' << rec.n_samples << ','
                << bits(rec.x) << ',' << bits(rec.s) << ',' << fmt(rec.y_model) << ',' << fmt(rec.y_true) << ','
                << fmt(rec.train_loss) << ',' << (conv ? "true" : "false") << '\n';
        }
    }
}

// -- gen-synthetic ----------------------------------------------------------

void gen_synthetic(const RunConfig& config, const std::filesystem::path& dir, std::size_t n_samples) {
    config.validate();
    const auto box = make_synthetic_blackbox(config.synthetic);
    write_file(dir / "spec.json", [&](std::ostream& out) { out << to_json(config.synthetic) << '\n'; });
    write_file(dir / "hidden.hubo", [&](std::ostream& out) { write_hubo(out, box->hidden()); });
    if (n_samples == 0) return;
    const Dataset data = box->sample(n_samples, config.seeds.front());
    write_file(dir / "samples.csv", [&](std::ostream& out) {
        out << "# config_hash=" << config.hash_hex() << "\n";
        out << "x,y\n";
        for (std::size_t r = 0; r < data.size(); ++r) out << bits(data.inputs[r]) << ',' << fmt_exact(data.targets[r]) << '\n';
    });
}

// -- solve-qubo -------------------------------------------------------------

void solve_qubo_file(const std::filesystem::path& path, const AnnealConfig& config, bool exact, std::ostream& out) {
    const QuboModel model = read_qubo_file(path);
    const SolveResult r = exact ? brute_force(model, config.one_hot_groups) : solve(model, config);
    out << "energy " << fmt_exact(r.best_energy) << '\n';
    out << "x " << bits(r.best_x) << '\n';
    out << "feasible " << (r.feasible ? "true" : "false") << '\n';
    out << "best_read " << r.best_read << '\n';
}

// -- command line -----------------------------------------------------------

namespace {

struct AnnealFlags {
    std::optional<std::size_t> reads;
    std::optional<std::size_t> sweeps;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_initial;
    std::optional<double> t_final;

    void add_to(CLI::App* app) {
        app->add_option("--reads", reads, "Annealing reads");
        app->add_option("--sweeps", sweeps, "Sweeps per read");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--t-initial", t_initial, "Initial temperature");
        app->add_option("--t-final", t_final, "Final temperature");
    }

    void apply(AnnealConfig& a) const {
        if (reads) a.num_reads = *reads;
        if (sweeps) a.sweeps_per_read = *sweeps;
        if (seed) a.seed = *seed;
        if (t_initial) a.t_initial = *t_initial;
        if (t_final) a.t_final = *t_final;
    }
};

struct ConfigFlags {
    std::string config_path;
    std::vector<std::string> sets;
    std::string output;

    void add_to(CLI::App* app) {
        app->add_option("-c,--config", config_path, "INI config file");
        app->add_option("--set", sets, "Override one key: section.key=value");
        app->add_option("-o,--output", output, "Output file (run.output)");
    }

    RunConfig build(const AnnealFlags& anneal) const {
        RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        for (const auto& s : sets) c.set(s);
        if (!output.empty()) c.output = output;
        anneal.apply(c.anneal);
        if (anneal.seed) c.seeds = {*anneal.seed};
        return c;
    }
};

OneHotGroups parse_groups(const std::vector<std::string>& specs) {
    OneHotGroups groups;
    for (const auto& spec : specs) {
        std::vector<std::size_t> g;
        for (const auto& t : tokens({spec})) g.push_back(parse_number<std::size_t>("--one-hot", t));
        groups.push_back(std::move(g));
    }
    return groups;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Factorization-machine surrogates for binary black-box optimization"};
    app.name("fmqubos");
    app.require_subcommand(1);

    AnnealFlags anneal_flags;
    ConfigFlags config_flags;

    auto* solve_cmd = app.add_subcommand("solve-qubo", "Anneal a QUBO text file");
    std::string model_path;
    std::vector<std::string> one_hot;
    bool exact = false;
    solve_cmd->add_option("model", model_path, "QUBO text file")->required();
    solve_cmd->add_option("--one-hot", one_hot, "Comma-separated one-hot group (repeatable)");
    solve_cmd->add_flag("--exact", exact, "Enumerate instead of annealing");
    anneal_flags.add_to(solve_cmd);

    auto* scenario_cmd = app.add_subcommand("run-scenario", "Grid test over (n_1, m) and write results CSV");
    config_flags.add_to(scenario_cmd);
    anneal_flags.add_to(scenario_cmd);

    auto* optimize_cmd = app.add_subcommand("run-optimize", "Black-box optimisation; writes the trace CSV");
    std::string optimizer;
    optimize_cmd->add_option("--optimizer", optimizer, "fmqubo, hofmqubo or fmqubos");
    config_flags.add_to(optimize_cmd);
    anneal_flags.add_to(optimize_cmd);

    auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic black-box spec and hidden HUBO");
    std::string out_dir;
    std::size_t n_samples = 0;
    gen_cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    gen_cmd->add_option("--samples", n_samples, "Also write this many samples");
    config_flags.add_to(gen_cmd);
    anneal_flags.add_to(gen_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve_cmd->parsed()) {
            AnnealConfig cfg;
            anneal_flags.apply(cfg);
            cfg.one_hot_groups = parse_groups(one_hot);
            solve_qubo_file(model_path, cfg, exact, out);
        } else if (scenario_cmd->parsed()) {
            const RunConfig cfg = config_flags.build(anneal_flags);
            const auto rows = run_scenario(cfg, err);
            print_summary(out, rows);
            out << "wrote " << cfg.output.string() << '\n';
        } else if (optimize_cmd->parsed()) {
            RunConfig cfg = config_flags.build(anneal_flags);
            if (!optimizer.empty()) cfg.optimizer = optimizer;
            run_optimize(cfg, out);
            out << "wrote " << cfg.output.string() << '\n';
        } else if (gen_cmd->parsed()) {
            const RunConfig cfg = config_flags.build(anneal_flags);
            gen_synthetic(cfg, out_dir, n_samples);
            out << "wrote " << out_dir << '\n';
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        for (const auto& k : e.offenders()) err << "  offending key: " << k << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitData;
    } catch (const UndefinedStatisticError& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::out_of_range& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DomainError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace fmqubos
