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

#include <stdexcept>
#include <string>

namespace fmqubos {

/// Vector or matrix sizes that do not agree.
class DimensionError : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

/// Input that violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

/// Value that cannot be represented in the requested encoding.
class RangeError : public std::out_of_range {
 public:
    using std::out_of_range::out_of_range;
};

/// Problem too large for an exhaustive method.
class CapacityError : public std::length_error {
 public:
    using std::length_error::length_error;
};

/// Training produced a non-finite loss.
class TrainingError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Black-box query outside the measured domain.
class DomainError : public std::domain_error {
 public:
    using std::domain_error::domain_error;
};

/// Correlation of a constant sequence, or a summary with no cases.
class UndefinedStatisticError : public std::domain_error {
 public:
    using std::domain_error::domain_error;
};

/// Malformed text input. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
    ParseError(const std::string& what, std::size_t line)
            : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
              line_(line) {}

    std::size_t line() const { return line_; }

 private:
    std::size_t line_;
};

}  // namespace fmqubos
