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

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fmqubos/errors.hpp"
#include "fmqubos/fm.hpp"

namespace fmqubos {

namespace {

constexpr const char* kFmTag = "fmqubos.fm/1";
constexpr const char* kHofmTag = "fmqubos.hofm/1";

using nlohmann::json;

json matrix_to_json(const LatentMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

LatentMatrix matrix_from_json(const json& rows, std::size_t n, std::size_t k) {
    if (!rows.is_array() || rows.size() != n) throw ParseError("latent matrix has wrong row count", 0);
    LatentMatrix m(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = rows[i].get<std::vector<double>>();
        if (r.size() != k) throw ParseError("latent matrix row " + std::to_string(i) + " has wrong width", 0);
        std::copy(r.begin(), r.end(), m.row(i).begin());
    }
    return m;
}

json read_tagged(std::istream& in, const char* tag) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model record is not valid JSON: ") + e.what(), 0);
    }
    if (!j.contains("format") || j["format"] != tag) {
        throw ParseError(std::string("expected format tag ") + tag, 0);
    }
    return j;
}

}  // namespace

void save_model(std::ostream& out, const FmModel& model) {
    json j;
    j["format"] = kFmTag;
    j["n_features"] = model.num_features();
    j["k"] = model.latent_dim();
    j["w0"] = model.w0;
    j["w"] = model.w;
    j["V"] = matrix_to_json(model.v);
    out << j.dump(1) << '\n';
}

void save_model(std::ostream& out, const HofmModel& model) {
    json j;
    j["format"] = kHofmTag;
    j["n_features"] = model.num_features();
    j["k"] = model.latent_dim();
    j["order"] = HofmModel::order;
    j["w0"] = model.w0;
    j["w"] = model.w;
    j["V2"] = matrix_to_json(model.v2);
    j["V3"] = matrix_to_json(model.v3);
    out << j.dump(1) << '\n';
}

FmModel load_fm_model(std::istream& in) {
    json j = read_tagged(in, kFmTag);
    try {
        const auto n = j.at("n_features").get<std::size_t>();
        const auto k = j.at("k").get<std::size_t>();
        FmModel m(n, k);
        m.w0 = j.at("w0").get<double>();
        m.w = j.at("w").get<std::vector<double>>();
        if (m.w.size() != n) throw ParseError("linear weights have wrong length", 0);
        m.v = matrix_from_json(j.at("V"), n, k);
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad FM record: ") + e.what(), 0);
    }
}

HofmModel load_hofm_model(std::istream& in) {
    json j = read_tagged(in, kHofmTag);
    try {
        const auto n = j.at("n_features").get<std::size_t>();
        const auto k = j.at("k").get<std::size_t>();
        if (j.at("order").get<std::size_t>() != HofmModel::order) {
            throw ParseError("only order-3 HOFM records are supported", 0);
        }
        HofmModel m(n, k);
        m.w0 = j.at("w0").get<double>();
        m.w = j.at("w").get<std::vector<double>>();
        if (m.w.size() != n) throw ParseError("linear weights have wrong length", 0);
        m.v2 = matrix_from_json(j.at("V2"), n, k);
        m.v3 = matrix_from_json(j.at("V3"), n, k);
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad HOFM record: ") + e.what(), 0);
    }
}

}  // namespace fmqubos
