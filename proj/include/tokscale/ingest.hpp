#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tokscale/core_model.hpp"
#include "tokscale/errors.hpp"

namespace tokscale {

/// A malformed input row. `row` is the 1-based line number within `file`.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string file, std::size_t row, std::string column, const std::string& what);

    const std::string& file() const noexcept { return file_; }
    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::string file_;
    std::size_t row_;
    std::string column_;
};

enum class Strictness { FailFast, SkipAndCount };

/// Names (header mode) or 0-based indices of the five consumed columns.
/// A purely numeric entry is always read as an index.
struct ColumnMapping {
    std::string from = "from";
    std::string to = "to";
    std::string from_is_contract = "fromIsContract";
    std::string to_is_contract = "toIsContract";
    std::string timestamp = "timestamp";
};

/// Either k equal periods over the observed span, or explicit boundaries.
struct PeriodSpec {
    int k = 3;
    std::vector<Timestamp> boundaries;

    static PeriodSpec parse(std::string_view text);
    std::string to_string() const;
};

struct IngestConfig {
    ColumnMapping columns;
    char delimiter = ',';
    bool has_header = true;
    PeriodSpec periods;
    Strictness strictness = Strictness::SkipAndCount;

    void validate() const;
};

/// Column positions resolved against a header (or the defaults).
struct FieldLayout {
    enum Field : std::size_t { From = 0, To, FromIsContract, ToIsContract, TimestampCol };
    std::array<std::size_t, 5> index{0, 1, 2, 3, 4};
    std::array<std::string, 5> name{"from", "to", "fromIsContract", "toIsContract", "timestamp"};

    static FieldLayout resolve(const ColumnMapping& mapping,
                               std::span<const std::string_view> header);
    static FieldLayout positional(const ColumnMapping& mapping);
};

/// Non-owning parse result; the views point into the source line.
struct RecordView {
    std::string_view sender;
    std::string_view receiver;
    bool sender_is_contract = false;
    bool receiver_is_contract = false;
    Timestamp timestamp = 0;

    Category category() const noexcept { return classify(sender_is_contract, receiver_is_contract); }
};

/// Splits one line on `delimiter`, trimming a trailing CR and one level of
/// surrounding double quotes per field.
std::vector<std::string_view> split_fields(std::string_view line, char delimiter);

RecordView parse_fields(std::span<const std::string_view> fields, const FieldLayout& layout,
                        std::size_t row, std::string_view file = {});

TransferRecord parse_record(std::span<const std::string_view> fields, const FieldLayout& layout,
                            std::size_t row = 0, std::string_view file = {});

/// Header-less convenience: columns resolved positionally from cfg.
TransferRecord parse_record(std::span<const std::string_view> fields, const IngestConfig& cfg,
                            std::size_t row = 0);

/// YYYY-MM-DD of a Unix timestamp (UTC, proleptic Gregorian, no leap seconds).
std::string to_utc_date(Timestamp ts);
/// Midnight UTC of a YYYY-MM-DD date.
Timestamp from_utc_date(std::string_view date);

/// Regular files named by `paths`; directories expand to their sorted entries.
std::vector<std::filesystem::path> expand_inputs(std::span<const std::filesystem::path> paths);

struct ReadStats {
    std::uint64_t rows_read = 0;
    std::uint64_t malformed_rows = 0;
};

/// Streams every data row of every input (plain or gzip) through `visit`.
/// Malformed rows throw in fail-fast mode and are tallied otherwise.
ReadStats for_each_record(std::span<const std::filesystem::path> inputs, const IngestConfig& cfg,
                          const std::function<void(const RecordView&)>& visit);

struct DatasetSummary {
    /// counts[period - 1][category]
    std::vector<std::array<std::uint64_t, 4>> counts;
    std::vector<Timestamp> boundaries;
    std::uint64_t total = 0;
    std::uint64_t rows_read = 0;
    std::uint64_t malformed_rows = 0;
    std::uint64_t out_of_span_rows = 0;
    std::optional<Timestamp> min_ts;
    std::optional<Timestamp> max_ts;

    std::uint64_t count(Category c, int period) const {
        return counts.at(static_cast<std::size_t>(period - 1))[static_cast<std::size_t>(c)];
    }
    std::uint64_t category_total(Category c) const;

    bool operator==(const DatasetSummary&) const = default;
};

/// Mergeable census fold. Partial censuses over disjoint row sets built
/// with the same partition merge into the census of their union.
class Census {
public:
    explicit Census(PeriodPartition partition);

    void add(Category c, Timestamp ts);
    void add_malformed() { ++malformed_; ++rows_read_; }
    void merge(const Census& other);

    DatasetSummary summary() const;

private:
    PeriodPartition partition_;
    std::vector<std::array<std::uint64_t, 4>> counts_;
    std::uint64_t rows_read_ = 0;
    std::uint64_t malformed_ = 0;
    std::uint64_t out_of_span_ = 0;
    std::optional<Timestamp> min_ts_;
    std::optional<Timestamp> max_ts_;
};

/// Partition for a config over an observed [min_ts, max_ts] span.
PeriodPartition make_partition(const PeriodSpec& spec, Timestamp min_ts, Timestamp max_ts);

/// Census of in-memory records under an explicit partition.
DatasetSummary census_records(std::span<const TransferRecord> records,
                              const PeriodPartition& partition);

/// File census. Single pass with explicit boundaries; otherwise a span pass
/// precedes the counting pass.
DatasetSummary ingest_census(std::span<const std::filesystem::path> inputs, const IngestConfig& cfg);

/// Whole-ledger in-memory form used by the analysis pipeline.
struct Ledger {
    AccountTable accounts;
    /// records[category] in input order
    std::array<std::vector<Transfer>, 4> records;
    ReadStats stats;
    std::optional<Timestamp> min_ts;
    std::optional<Timestamp> max_ts;
};

Ledger load_ledger(std::span<const std::filesystem::path> inputs, const IngestConfig& cfg);

/// Census of a loaded ledger under `partition`.
DatasetSummary census_ledger(const Ledger& ledger, const PeriodPartition& partition);

/// Transfers of one category falling in period `period` of `partition`.
std::vector<Transfer> slice_of(const Ledger& ledger, Category c, const PeriodPartition& partition,
                               int period);

}  // namespace tokscale
