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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fmqubos/binopt.hpp"
#include "fmqubos/blackbox.hpp"
#include "fmqubos/fm.hpp"

namespace fmqubos {

/// Which prediction task a dataset belongs to.
///   one: dose-response matrix completion, 8 concentration levels per drug
///   two: unseen drug combinations per cell line, 4 levels per drug
enum class Scenario { one = 1, two = 2 };

std::size_t level_count(Scenario s);

struct ResponseRecord {
    std::string drug_a;
    std::string drug_b;
    std::string cell_line;
    std::size_t conc_a_level = 0;  // 0-based
    std::size_t conc_b_level = 0;
    double response = 0.0;

    friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

inline constexpr const char* kRecordHeader = "drug_a,drug_b,cell_line,conc_a_level,conc_b_level,response";

/// CSV with header kRecordHeader. Throws ParseError (with line number) on
/// malformed rows and ValidationError (message names the line) on levels or
/// responses outside the scenario's domain.
std::vector<ResponseRecord> read_records(std::istream& in, Scenario scenario);
std::vector<ResponseRecord> load_records(const std::filesystem::path& path, Scenario scenario);
void write_records(std::ostream& out, const std::vector<ResponseRecord>& records);

/// Each record plus its drug/concentration-swapped twin; size doubles.
std::vector<ResponseRecord> symmetrize(const std::vector<ResponseRecord>& records);

// -- encoding ---------------------------------------------------------------

/// One one-hot block. `field` names the record field it encodes:
/// drug_a, drug_b, conc_a or conc_b.
struct OneHotBlock {
    std::string field;
    std::size_t cardinality;
};

struct EncodingSpec {
    std::vector<OneHotBlock> blocks;
    /// Slack bits appended after every block.
    std::size_t slack_bits = 0;

    std::size_t total_bits() const;
    /// Index sets of the blocks (slack bits are not grouped).
    OneHotGroups one_hot_groups() const;
};

/// Maps records to concatenated one-hot blocks and back.
class RecordEncoder {
 public:
    /// Scenario one: conc_a(8) conc_b(8), 16 bits.
    static RecordEncoder scenario1();
    /// Scenario two: drug_a(|drugs|) conc_a(4) drug_b(|drugs|) conc_b(4);
    /// 88 bits for 40 drugs.
    static RecordEncoder scenario2(std::vector<std::string> drugs);
    /// Vocabulary built from the sorted distinct drug ids in the records.
    static RecordEncoder scenario2(const std::vector<ResponseRecord>& records);

    RecordEncoder(EncodingSpec spec, std::vector<std::string> drugs);

    const EncodingSpec& spec() const { return spec_; }
    const std::vector<std::string>& drugs() const { return drugs_; }

    /// Throws ValidationError for unknown drugs or levels out of range.
    BinaryVector encode(const ResponseRecord& record) const;

    /// Fields not covered by the encoding are left empty/zero. Throws
    /// ValidationError unless every block has exactly one hot bit.
    ResponseRecord decode(std::span<const std::uint8_t> x) const;

    Dataset encode_all(const std::vector<ResponseRecord>& records) const;

 private:
    std::size_t drug_index(const std::string& id) const;

    EncodingSpec spec_;
    std::vector<std::string> drugs_;
};

// -- scenario one -----------------------------------------------------------

inline constexpr std::size_t kScenario1Levels = 8;

struct DoseCell {
    std::size_t a;  // level of drug_a (row)
    std::size_t b;  // level of drug_b (column)

    friend auto operator<=>(const DoseCell&, const DoseCell&) = default;
};

struct DoseResponseMatrix {
    std::string drug_a;
    std::string drug_b;
    std::string cell_line;
    std::array<double, kScenario1Levels * kScenario1Levels> values{};

    double at(DoseCell c) const { return values[c.a * kScenario1Levels + c.b]; }
    ResponseRecord record(DoseCell c) const;
};

/// Groups records by (drug_a, drug_b, cell_line) in first-seen order. Each
/// group must cover all 64 cells exactly once.
std::vector<DoseResponseMatrix> group_matrices(const std::vector<ResponseRecord>& records);

struct CellSplit {
    std::vector<DoseCell> train;
    std::vector<DoseCell> test;
};

/// Number of cells outside the first row, first column and diagonal (42).
std::size_t scenario1_extra_capacity();

/// Train: first row and column (single-drug responses), the diagonal and
/// n_extra seeded-random other cells. Test: the rest. Both sorted.
CellSplit split_scenario1(std::size_t n_extra, std::uint64_t seed);

Dataset cells_to_dataset(const DoseResponseMatrix& matrix, const std::vector<DoseCell>& cells,
                         const RecordEncoder& encoder);

// -- scenario two -----------------------------------------------------------

struct RecordSplit {
    std::vector<ResponseRecord> train;
    std::vector<ResponseRecord> test;
    /// Held-out unordered pairs (first < second).
    std::vector<std::pair<std::string, std::string>> held_out;
};

/// Holds out max(1, round(missing_ratio * #pairs)) unordered drug pairs with
/// all their dose points. Records with drug_a == drug_b are single-drug
/// responses and always train. All records must share one cell line.
RecordSplit split_scenario2(const std::vector<ResponseRecord>& records, double missing_ratio,
                            std::uint64_t seed);

/// Distinct cell lines in first-seen order.
std::vector<std::string> cell_lines(const std::vector<ResponseRecord>& records);
std::vector<ResponseRecord> filter_cell_line(const std::vector<ResponseRecord>& records,
                                             const std::string& cell_line);

// -- black boxes ------------------------------------------------------------

/// Exact lookup over the encoded records.
std::unique_ptr<TableBlackBox> make_table_blackbox(const std::vector<ResponseRecord>& records,
                                                   const RecordEncoder& encoder);

/// Reproducible description of a synthetic black box.
struct SyntheticSpec {
    std::size_t n_groups = 4;
    std::size_t group_size = 3;
    /// Subset of {1, 2, 3}. Order-d terms span d distinct groups.
    std::vector<std::size_t> planted_orders{1, 2, 3};
    /// Standard deviation of the planted coefficients per order (index 0 ->
    /// order 1). Missing entries default to 1.
    std::vector<double> coefficient_scale{1.0, 1.0, 1.0};
    double noise_sd = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t total_bits() const { return n_groups * group_size; }
};

std::string to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const std::string& text);

/// Hidden polynomial over one-hot inputs: every product of bits taken from
/// distinct groups at each planted order gets a N(0, scale^2) coefficient.
std::unique_ptr<PolynomialBlackBox> make_synthetic_blackbox(const SyntheticSpec& spec);

}  // namespace fmqubos
