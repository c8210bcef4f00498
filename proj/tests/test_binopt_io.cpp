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

#include <random>
#include <sstream>

#include "fmqubos/binopt_io.hpp"
#include "fmqubos/errors.hpp"
#include "oracles.hpp"

using namespace fmqubos;

TEST_CASE("read_qubo parses every line kind", "[io]") {
    std::istringstream in("# model\nvars 4\nc0 0.5\n2 -1\n0 1 2.0\n1 0 1.0\n\n");
    const QuboModel q = read_qubo(in);
    CHECK(q.num_variables() == 4);
    CHECK(q.constant() == 0.5);
    CHECK(q.linear(2) == -1.0);
    CHECK(q.quadratic(0, 1) == 3.0);
}

TEST_CASE("read_qubo infers the variable count", "[io]") {
    std::istringstream in("0 5 1.0\n");
    CHECK(read_qubo(in).num_variables() == 6);
    std::istringstream empty("# nothing\n");
    CHECK(read_qubo(empty).num_variables() == 0);
}

TEST_CASE("parse errors carry the line number", "[io]") {
    std::istringstream bad_number("0 1 2\n0 x\n");
    try {
        read_qubo(bad_number);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream too_high("0 1 2 1.0\n");
    CHECK_THROWS_AS(read_qubo(too_high), ParseError);
    std::istringstream out_of_range("vars 2\n5 1.0\n");
    CHECK_THROWS_AS(read_qubo(out_of_range), ParseError);
    CHECK_THROWS_AS(read_qubo_file("/nonexistent/model.qubo"), ParseError);
}

TEST_CASE("QUBO write/read roundtrip is lossless", "[io][property]") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        const QuboModel q = oracle::random_qubo(1 + t % 9, rng);
        std::stringstream buf;
        write_qubo(buf, q);
        const QuboModel back = read_qubo(buf);
        REQUIRE(back.num_variables() == q.num_variables());
        REQUIRE(approx_equal(back, q, 0.0));
    }
}

TEST_CASE("HUBO write/read roundtrip is lossless", "[io][property]") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        HuboModel h = oracle::random_hubo(6, 4, 8, rng);
        h.add_constant(0.25);
        std::stringstream buf;
        write_hubo(buf, h);
        const HuboModel back = read_hubo(buf);
        REQUIRE(back.num_variables() == h.num_variables());
        REQUIRE(back.terms() == h.terms());
        REQUIRE(back.constant() == h.constant());
    }
}

TEST_CASE("read_hubo accepts any order", "[io]") {
    std::istringstream in("vars 5\n0 2 4 -1.5\n3 1\nc0 2\n");
    const HuboModel h = read_hubo(in);
    CHECK(h.coefficient({0, 2, 4}) == -1.5);
    CHECK(h.coefficient({3}) == 1.0);
    CHECK(h.constant() == 2.0);
}
