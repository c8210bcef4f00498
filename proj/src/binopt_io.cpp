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

#include "fmqubos/binopt_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "fmqubos/errors.hpp"

namespace fmqubos {

namespace {

struct RawTerm {
    std::vector<std::size_t> indices;  // empty: constant
    double coefficient;
    std::size_t line;
};

struct RawModel {
    std::optional<std::size_t> declared_vars;
    std::vector<RawTerm> terms;
};

std::size_t parse_index(const std::string& token, std::size_t line) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("expected a variable index, got '" + token + "'", line);
    }
    return value;
}

double parse_coefficient(const std::string& token, std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a coefficient, got '" + token + "'", line);
    }
}

RawModel read_raw(std::istream& in, std::size_t max_order) {
    RawModel raw;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
        std::istringstream fields(text);
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;) tokens.push_back(tok);
        if (tokens.empty()) continue;

        if (tokens[0] == "vars") {
            if (tokens.size() != 2) throw ParseError("'vars' takes one count", line);
            raw.declared_vars = parse_index(tokens[1], line);
            continue;
        }
        if (tokens.size() < 2) throw ParseError("term needs at least an index and a coefficient", line);
        RawTerm term{{}, parse_coefficient(tokens.back(), line), line};
        if (tokens[0] == "c0") {
            if (tokens.size() != 2) throw ParseError("'c0' takes one coefficient", line);
        } else {
            if (tokens.size() - 1 > max_order) {
                throw ParseError("term of order " + std::to_string(tokens.size() - 1) +
                                 " in a QUBO file", line);
            }
            for (std::size_t t = 0; t + 1 < tokens.size(); ++t) {
                term.indices.push_back(parse_index(tokens[t], line));
            }
        }
        raw.terms.push_back(std::move(term));
    }
    return raw;
}

std::size_t variable_count(const RawModel& raw) {
    std::size_t n = 0;
    for (const RawTerm& t : raw.terms) {
        for (std::size_t i : t.indices) n = std::max(n, i + 1);
    }
    if (raw.declared_vars) {
        if (*raw.declared_vars < n) {
            throw ParseError("index " + std::to_string(n - 1) + " exceeds declared vars " +
                                     std::to_string(*raw.declared_vars), 0);
        }
        n = *raw.declared_vars;
    }
    return n;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string(), 0);
    return in;
}

void write_number(std::ostream& out, double v) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
}

}  // namespace

QuboModel read_qubo(std::istream& in) {
    RawModel raw = read_raw(in, 2);
    QuboModel model(variable_count(raw));
    for (const RawTerm& t : raw.terms) {
        switch (t.indices.size()) {
            case 0: model.add_constant(t.coefficient); break;
            case 1: model.add_linear(t.indices[0], t.coefficient); break;
            default: model.add_quadratic(t.indices[0], t.indices[1], t.coefficient); break;
        }
    }
    return model;
}

QuboModel read_qubo_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_qubo(in);
}

void write_qubo(std::ostream& out, const QuboModel& model) {
    out << "vars " << model.num_variables() << '\n';
    if (model.constant() != 0.0) {
        out << "c0 ";
        write_number(out, model.constant());
        out << '\n';
    }
    for (std::size_t i = 0; i < model.num_variables(); ++i) {
        if (model.linear_terms()[i] == 0.0) continue;
        out << i << ' ';
        write_number(out, model.linear_terms()[i]);
        out << '\n';
    }
    for (const auto& [key, bias] : model.quadratic_terms()) {
        out << key.first << ' ' << key.second << ' ';
        write_number(out, bias);
        out << '\n';
    }
}

HuboModel read_hubo(std::istream& in) {
    RawModel raw = read_raw(in, std::numeric_limits<std::size_t>::max());
    HuboModel model(variable_count(raw));
    for (const RawTerm& t : raw.terms) model.add_term(t.indices, t.coefficient);
    return model;
}

HuboModel read_hubo_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_hubo(in);
}

void write_hubo(std::ostream& out, const HuboModel& model) {
    out << "vars " << model.num_variables() << '\n';
    if (model.constant() != 0.0) {
        out << "c0 ";
        write_number(out, model.constant());
        out << '\n';
    }
    for (const auto& [key, coeff] : model.terms()) {
        for (std::size_t i : key) out << i << ' ';
        write_number(out, coeff);
        out << '\n';
    }
}

}  // namespace fmqubos
