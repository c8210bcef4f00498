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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fmqubos/binopt.hpp"

namespace fmqubos {

// Plain-text model format, one term per line:
//
//     # comment
//     vars 4        optional; otherwise 1 + the largest index seen
//     c0 0.5        constant
//     2 -1.0        linear term (QUBO) / order-1 term (HUBO)
//     0 1 2.0       quadratic term
//     0 1 3 -1.0    HUBO only: any number of indices, then the coefficient
//
// Repeated terms accumulate. Numbers are written with 17 significant digits
// so write/read is lossless.

QuboModel read_qubo(std::istream& in);
QuboModel read_qubo_file(const std::filesystem::path& path);
void write_qubo(std::ostream& out, const QuboModel& model);

HuboModel read_hubo(std::istream& in);
HuboModel read_hubo_file(const std::filesystem::path& path);
void write_hubo(std::ostream& out, const HuboModel& model);

}  // namespace fmqubos
