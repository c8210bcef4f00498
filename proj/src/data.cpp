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

#include "fmqubos/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fmqubos/errors.hpp"
#include "fmqubos/seed.hpp"

namespace fmqubos {

std::size_t level_count(Scenario s) { return s == Scenario::one ? 8 : 4; }

// -- CSV --------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::size_t parse_level(const std::string& text, std::size_t line) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError("bad concentration level '" + text + "'", line);
    }
    return v;
}

double parse_response(const std::string& text, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad response '" + text + "'", line);
    }
}

}  // namespace

std::vector<ResponseRecord> read_records(std::istream& in, Scenario scenario) {
    std::vector<ResponseRecord> records;
    std::string text;
    std::size_t line = 0;
    if (!std::getline(in, text)) throw ParseError("missing header", 1);
    ++line;
    if (trim(text) != kRecordHeader) {
        throw ParseError("expected header '" + std::string(kRecordHeader) + "'", line);
    }
    const std::size_t levels = level_count(scenario);
    while (std::getline(in, text)) {
        ++line;
        text = trim(text);
        if (text.empty()) continue;
        auto fields = split_csv(text);
        if (fields.size() != 6) {
            throw ParseError("expected 6 fields, found " + std::to_string(fields.size()), line);
        }
        for (auto& f : fields) f = trim(f);
        ResponseRecord r{fields[0], fields[1], fields[2], parse_level(fields[3], line),
                         parse_level(fields[4], line), parse_response(fields[5], line)};
        if (r.drug_a.empty() || r.drug_b.empty() || r.cell_line.empty()) {
            throw ParseError("empty identifier", line);
        }
        if (r.conc_a_level >= levels || r.conc_b_level >= levels) {
            throw ValidationError("line " + std::to_string(line) + ": concentration level out of range [0, " +
                                  std::to_string(levels) + ")");
        }
        if (scenario == Scenario::two && !(r.response > -100.0)) {
            throw ValidationError("line " + std::to_string(line) +
                                  ": percentage growth must exceed -100");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<ResponseRecord> load_records(const std::filesystem::path& path, Scenario scenario) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string(), 0);
    return read_records(in, scenario);
}

void write_records(std::ostream& out, const std::vector<ResponseRecord>& records) {
    out << kRecordHeader << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : records) {
        out << r.drug_a << ',' << r.drug_b << ',' << r.cell_line << ',' << r.conc_a_level << ','
            << r.conc_b_level << ',' << r.response << '\n';
    }
}

std::vector<ResponseRecord> symmetrize(const std::vector<ResponseRecord>& records) {
    std::vector<ResponseRecord> out;
    out.reserve(2 * records.size());
    for (const auto& r : records) {
        out.push_back(r);
        out.push_back({r.drug_b, r.drug_a, r.cell_line, r.conc_b_level, r.conc_a_level, r.response});
    }
    return out;
}

// -- encoding ---------------------------------------------------------------

std::size_t EncodingSpec::total_bits() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.cardinality;
    return n;
}

OneHotGroups EncodingSpec::one_hot_groups() const {
    OneHotGroups groups;
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        std::vector<std::size_t> g(b.cardinality);
        std::iota(g.begin(), g.end(), offset);
        groups.push_back(std::move(g));
        offset += b.cardinality;
    }
    return groups;
}

RecordEncoder RecordEncoder::scenario1() {
    return RecordEncoder({{{"conc_a", 8}, {"conc_b", 8}}, 0}, {});
}

RecordEncoder RecordEncoder::scenario2(std::vector<std::string> drugs) {
    const std::size_t d = drugs.size();
    return RecordEncoder({{{"drug_a", d}, {"conc_a", 4}, {"drug_b", d}, {"conc_b", 4}}, 0},
                         std::move(drugs));
}

RecordEncoder RecordEncoder::scenario2(const std::vector<ResponseRecord>& records) {
    std::set<std::string> ids;
    for (const auto& r : records) {
        ids.insert(r.drug_a);
        ids.insert(r.drug_b);
    }
    return scenario2(std::vector<std::string>(ids.begin(), ids.end()));
}

RecordEncoder::RecordEncoder(EncodingSpec spec, std::vector<std::string> drugs)
        : spec_(std::move(spec)), drugs_(std::move(drugs)) {
    static const std::set<std::string> known{"drug_a", "drug_b", "conc_a", "conc_b"};
    for (const auto& b : spec_.blocks) {
        if (!known.contains(b.field)) throw ValidationError("unknown encoded field '" + b.field + "'");
        if (b.cardinality == 0) throw ValidationError("one-hot block '" + b.field + "' is empty");
        if (b.field.starts_with("drug") && b.cardinality != drugs_.size()) {
            throw ValidationError("drug block size does not match the vocabulary");
        }
    }
}

std::size_t RecordEncoder::drug_index(const std::string& id) const {
    auto it = std::find(drugs_.begin(), drugs_.end(), id);
    if (it == drugs_.end()) throw ValidationError("drug '" + id + "' is not in the vocabulary");
    return static_cast<std::size_t>(it - drugs_.begin());
}

BinaryVector RecordEncoder::encode(const ResponseRecord& record) const {
    BinaryVector x(spec_.total_bits(), 0);
    std::size_t offset = 0;
    for (const auto& b : spec_.blocks) {
        std::size_t hot = 0;
        if (b.field == "drug_a") hot = drug_index(record.drug_a);
        else if (b.field == "drug_b") hot = drug_index(record.drug_b);
        else if (b.field == "conc_a") hot = record.conc_a_level;
        else hot = record.conc_b_level;
        if (hot >= b.cardinality) {
            throw ValidationError("value " + std::to_string(hot) + " out of range for block '" +
                                  b.field + "'");
        }
        x[offset + hot] = 1;
        offset += b.cardinality;
    }
    return x;
}

ResponseRecord RecordEncoder::decode(std::span<const std::uint8_t> x) const {
    if (x.size() < spec_.total_bits()) throw DimensionError("input shorter than the encoding");
    ResponseRecord r;
    std::size_t offset = 0;
    for (const auto& b : spec_.blocks) {
        std::size_t hot = b.cardinality;
        for (std::size_t i = 0; i < b.cardinality; ++i) {
            if (!x[offset + i]) continue;
            if (hot != b.cardinality) throw ValidationError("block '" + b.field + "' has two hot bits");
            hot = i;
        }
        if (hot == b.cardinality) throw ValidationError("block '" + b.field + "' has no hot bit");
        if (b.field == "drug_a") r.drug_a = drugs_[hot];
        else if (b.field == "drug_b") r.drug_b = drugs_[hot];
        else if (b.field == "conc_a") r.conc_a_level = hot;
        else r.conc_b_level = hot;
        offset += b.cardinality;
    }
    return r;
}

Dataset RecordEncoder::encode_all(const std::vector<ResponseRecord>& records) const {
    Dataset out;
    for (const auto& r : records) out.push_back(encode(r), r.response);
    return out;
}

// -- scenario one -----------------------------------------------------------

ResponseRecord DoseResponseMatrix::record(DoseCell c) const {
    return {drug_a, drug_b, cell_line, c.a, c.b, at(c)};
}

std::vector<DoseResponseMatrix> group_matrices(const std::vector<ResponseRecord>& records) {
    constexpr std::size_t L = kScenario1Levels;
    std::vector<DoseResponseMatrix> out;
    std::vector<std::array<bool, L * L>> seen;
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
    for (const auto& r : records) {
        if (r.conc_a_level >= L || r.conc_b_level >= L) throw ValidationError("level out of range");
        auto key = std::make_tuple(r.drug_a, r.drug_b, r.cell_line);
        auto [it, inserted] = index.try_emplace(key, out.size());
        if (inserted) {
            out.push_back({r.drug_a, r.drug_b, r.cell_line, {}});
            seen.emplace_back();
            seen.back().fill(false);
        }
        const std::size_t cell = r.conc_a_level * L + r.conc_b_level;
        if (seen[it->second][cell]) {
            throw ValidationError("duplicate cell in matrix " + r.drug_a + "/" + r.drug_b + "/" + r.cell_line);
        }
        seen[it->second][cell] = true;
        out[it->second].values[cell] = r.response;
    }
    for (std::size_t m = 0; m < out.size(); ++m) {
        if (std::find(seen[m].begin(), seen[m].end(), false) != seen[m].end()) {
            throw ValidationError("matrix " + out[m].drug_a + "/" + out[m].drug_b + "/" +
                                  out[m].cell_line + " is incomplete");
        }
    }
    return out;
}

namespace {

bool is_fixed_training_cell(DoseCell c) { return c.a == 0 || c.b == 0 || c.a == c.b; }

}  // namespace

std::size_t scenario1_extra_capacity() {
    std::size_t n = 0;
    for (std::size_t a = 0; a < kScenario1Levels; ++a) {
        for (std::size_t b = 0; b < kScenario1Levels; ++b) n += is_fixed_training_cell({a, b}) ? 0 : 1;
    }
    return n;
}

CellSplit split_scenario1(std::size_t n_extra, std::uint64_t seed) {
    CellSplit split;
    std::vector<DoseCell> rest;
    for (std::size_t a = 0; a < kScenario1Levels; ++a) {
        for (std::size_t b = 0; b < kScenario1Levels; ++b) {
            (is_fixed_training_cell({a, b}) ? split.train : rest).push_back({a, b});
        }
    }
    if (n_extra > rest.size()) {
        throw ValidationError("n_extra = " + std::to_string(n_extra) + " exceeds the " +
                              std::to_string(rest.size()) + " available off-diagonal cells");
    }
    Rng rng(derive_seed(seed, "split-scenario1"));
    std::shuffle(rest.begin(), rest.end(), rng);
    split.train.insert(split.train.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_extra));
    split.test.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_extra), rest.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

Dataset cells_to_dataset(const DoseResponseMatrix& matrix, const std::vector<DoseCell>& cells,
                         const RecordEncoder& encoder) {
    Dataset out;
    for (DoseCell c : cells) out.push_back(encoder.encode(matrix.record(c)), matrix.at(c));
    return out;
}

// -- scenario two -----------------------------------------------------------

namespace {

std::pair<std::string, std::string> unordered(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

RecordSplit split_scenario2(const std::vector<ResponseRecord>& records, double missing_ratio,
                            std::uint64_t seed) {
    if (!(missing_ratio > 0.0 && missing_ratio < 1.0)) {
        throw ValidationError("missing_ratio must lie in (0, 1)");
    }
    std::set<std::pair<std::string, std::string>> pair_set;
    for (const auto& r : records) {
        if (r.cell_line != records.front().cell_line) {
            throw ValidationError("scenario-two split expects a single cell line");
        }
        if (r.drug_a != r.drug_b) pair_set.insert(unordered(r.drug_a, r.drug_b));
    }
    if (pair_set.empty()) throw ValidationError("no drug combinations to hold out");

    std::vector<std::pair<std::string, std::string>> pairs(pair_set.begin(), pair_set.end());
    const auto wanted = static_cast<std::size_t>(std::llround(missing_ratio * static_cast<double>(pairs.size())));
    const std::size_t n_hold = std::clamp<std::size_t>(wanted, 1, pairs.size());
    Rng rng(derive_seed(seed, "split-scenario2"));
    std::shuffle(pairs.begin(), pairs.end(), rng);

    RecordSplit split;
    split.held_out.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(n_hold));
    std::sort(split.held_out.begin(), split.held_out.end());
    const std::set<std::pair<std::string, std::string>> held(split.held_out.begin(), split.held_out.end());
    for (const auto& r : records) {
        const bool out = r.drug_a != r.drug_b && held.contains(unordered(r.drug_a, r.drug_b));
        (out ? split.test : split.train).push_back(r);
    }
    return split;
}

std::vector<std::string> cell_lines(const std::vector<ResponseRecord>& records) {
    std::vector<std::string> out;
    for (const auto& r : records) {
        if (std::find(out.begin(), out.end(), r.cell_line) == out.end()) out.push_back(r.cell_line);
    }
    return out;
}

std::vector<ResponseRecord> filter_cell_line(const std::vector<ResponseRecord>& records,
                                             const std::string& cell_line) {
    std::vector<ResponseRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&](const ResponseRecord& r) { return r.cell_line == cell_line; });
    return out;
}

// -- black boxes ------------------------------------------------------------

std::unique_ptr<TableBlackBox> make_table_blackbox(const std::vector<ResponseRecord>& records,
                                                   const RecordEncoder& encoder) {
    if (records.empty()) throw ValidationError("table black box needs at least one record");
    return std::make_unique<TableBlackBox>(encoder.encode_all(records), encoder.spec().one_hot_groups());
}

void SyntheticSpec::validate() const {
    if (n_groups == 0 || group_size == 0) throw ValidationError("synthetic box needs groups");
    for (std::size_t o : planted_orders) {
        if (o < 1 || o > 3) throw ValidationError("planted orders must be within {1, 2, 3}");
        if (o > n_groups) throw ValidationError("planted order exceeds the number of groups");
    }
    if (!(noise_sd >= 0.0)) throw ValidationError("noise_sd must be >= 0");
}

std::string to_json(const SyntheticSpec& spec) {
    nlohmann::json j;
    j["format"] = "fmqubos.synthetic/1";
    j["n_groups"] = spec.n_groups;
    j["group_size"] = spec.group_size;
    j["planted_orders"] = spec.planted_orders;
    j["coefficient_scale"] = spec.coefficient_scale;
    j["noise_sd"] = spec.noise_sd;
    j["seed"] = spec.seed;
    return j.dump(1);
}

SyntheticSpec synthetic_spec_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        if (j.value("format", "") != "fmqubos.synthetic/1") throw ParseError("bad synthetic spec tag", 0);
        SyntheticSpec s;
        s.n_groups = j.at("n_groups").get<std::size_t>();
        s.group_size = j.at("group_size").get<std::size_t>();
        s.planted_orders = j.at("planted_orders").get<std::vector<std::size_t>>();
        s.coefficient_scale = j.at("coefficient_scale").get<std::vector<double>>();
        s.noise_sd = j.at("noise_sd").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad synthetic spec: ") + e.what(), 0);
    }
}

std::unique_ptr<PolynomialBlackBox> make_synthetic_blackbox(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t G = spec.n_groups;
    const std::size_t S = spec.group_size;
    HuboModel hidden(G * S);
    Rng rng(derive_seed(spec.seed, "synthetic-coefficients"));
    std::normal_distribution<double> normal(0.0, 1.0);
    auto scale = [&](std::size_t order) {
        return order - 1 < spec.coefficient_scale.size() ? spec.coefficient_scale[order - 1] : 1.0;
    };
    auto bit = [S](std::size_t group, std::size_t member) { return group * S + member; };

    std::set<std::size_t> orders(spec.planted_orders.begin(), spec.planted_orders.end());
    // Fixed generation order keeps coefficients stable for a given seed.
    for (std::size_t order : orders) {
        const double sd = scale(order);
        if (order == 1) {
            for (std::size_t i = 0; i < G * S; ++i) hidden.add_term({i}, sd * normal(rng));
        } else if (order == 2) {
            for (std::size_t g1 = 0; g1 < G; ++g1)
                for (std::size_t g2 = g1 + 1; g2 < G; ++g2)
                    for (std::size_t a = 0; a < S; ++a)
                        for (std::size_t b = 0; b < S; ++b)
                            hidden.add_term({bit(g1, a), bit(g2, b)}, sd * normal(rng));
        } else {
            for (std::size_t g1 = 0; g1 < G; ++g1)
                for (std::size_t g2 = g1 + 1; g2 < G; ++g2)
                    for (std::size_t g3 = g2 + 1; g3 < G; ++g3)
                        for (std::size_t a = 0; a < S; ++a)
                            for (std::size_t b = 0; b < S; ++b)
                                for (std::size_t c = 0; c < S; ++c)
                                    hidden.add_term({bit(g1, a), bit(g2, b), bit(g3, c)}, sd * normal(rng));
        }
    }
    OneHotGroups groups;
    for (std::size_t g = 0; g < G; ++g) {
        std::vector<std::size_t> members(S);
        std::iota(members.begin(), members.end(), g * S);
        groups.push_back(std::move(members));
    }
    return std::make_unique<PolynomialBlackBox>(std::move(hidden), std::move(groups), spec.noise_sd,
                                                derive_seed(spec.seed, "synthetic-noise"));
}

}  // namespace fmqubos
