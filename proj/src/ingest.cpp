#include "tokscale/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <charconv>
#include <chrono>

namespace tokscale {

namespace fs = std::filesystem;

ParseError::ParseError(std::string file, std::size_t row, std::string column, const std::string& what)
    : std::runtime_error((file.empty() ? std::string("<input>") : file) + ":" + std::to_string(row) +
                         ": column '" + column + "': " + what),
      file_(std::move(file)),
      row_(row),
      column_(std::move(column)) {}

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> parse_flag(std::string_view s) {
    if (s == "0") return false;
    if (s == "1") return true;
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "false") return false;
    if (lower == "true") return true;
    return std::nullopt;
}

std::array<const std::string*, 5> mapping_entries(const ColumnMapping& m) {
    return {&m.from, &m.to, &m.from_is_contract, &m.to_is_contract, &m.timestamp};
}

// gzread transparently passes through uncompressed files.
class LineReader {
public:
    explicit LineReader(const fs::path& path) : path_(path.string()) {
        file_ = gzopen(path_.c_str(), "rb");
        if (file_ == nullptr) throw IoError("cannot open input file: " + path_);
        gzbuffer(file_, 1 << 17);
    }
    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;
    ~LineReader() {
        if (file_ != nullptr) gzclose(file_);
    }

    bool next(std::string& line) {
        line.clear();
        char buf[4096];
        while (true) {
            if (gzgets(file_, buf, sizeof buf) == nullptr) {
                int err = 0;
                const char* msg = gzerror(file_, &err);
                if (err != Z_OK && err != Z_STREAM_END)
                    throw IoError("read error in " + path_ + ": " + msg);
                return !line.empty();
            }
            line.append(buf);
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                return true;
            }
        }
    }

private:
    std::string path_;
    gzFile file_ = nullptr;
};

}  // namespace

PeriodSpec PeriodSpec::parse(std::string_view text) {
    PeriodSpec spec;
    if (text.find(',') == std::string_view::npos) {
        auto k = parse_int(text);
        if (!k || *k < 1) throw ConfigError("--periods: expected a positive integer or a boundary list");
        spec.k = static_cast<int>(*k);
        return spec;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        if (auto v = parse_int(item)) {
            spec.boundaries.push_back(*v);
        } else {
            try {
                spec.boundaries.push_back(from_utc_date(item));
            } catch (const ConfigError&) {
                throw ConfigError("--periods: bad boundary '" + std::string(item) +
                                  "' (expected Unix seconds or YYYY-MM-DD)");
            }
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    for (std::size_t i = 1; i < spec.boundaries.size(); ++i)
        if (spec.boundaries[i] <= spec.boundaries[i - 1])
            throw ConfigError("--periods: boundaries must be strictly ascending");
    spec.k = static_cast<int>(spec.boundaries.size()) - 1;
    return spec;
}

std::string PeriodSpec::to_string() const {
    if (boundaries.empty()) return std::to_string(k);
    std::string out;
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(boundaries[i]);
    }
    return out;
}

void IngestConfig::validate() const {
    if (static_cast<unsigned char>(delimiter) < 0x20 && delimiter != '\t')
        throw ConfigError("delimiter must be a single printable character (or tab)");
    if (periods.boundaries.empty() && periods.k < 1) throw ConfigError("period count must be >= 1");
    if (!periods.boundaries.empty()) {
        if (periods.boundaries.size() < 2) throw ConfigError("need at least two period boundaries");
        for (std::size_t i = 1; i < periods.boundaries.size(); ++i)
            if (periods.boundaries[i] <= periods.boundaries[i - 1])
                throw ConfigError("period boundaries must be strictly ascending");
    }
}

FieldLayout FieldLayout::resolve(const ColumnMapping& mapping, std::span<const std::string_view> header) {
    FieldLayout layout;
    auto entries = mapping_entries(mapping);
    for (std::size_t f = 0; f < 5; ++f) {
        const std::string& want = *entries[f];
        layout.name[f] = want;
        auto it = std::find(header.begin(), header.end(), std::string_view(want));
        if (it != header.end()) {
            layout.index[f] = static_cast<std::size_t>(it - header.begin());
        } else if (all_digits(want)) {
            layout.index[f] = static_cast<std::size_t>(*parse_int(want));
        } else {
            throw ParseError({}, 1, want, "column not present in header");
        }
    }
    return layout;
}

FieldLayout FieldLayout::positional(const ColumnMapping& mapping) {
    FieldLayout layout;
    auto entries = mapping_entries(mapping);
    for (std::size_t f = 0; f < 5; ++f) {
        const std::string& want = *entries[f];
        if (all_digits(want)) {
            layout.index[f] = static_cast<std::size_t>(*parse_int(want));
            layout.name[f] = "#" + want;
        } else {
            layout.index[f] = f;
            layout.name[f] = want;
        }
    }
    return layout;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(delimiter, pos);
        auto field = line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"')
            field = field.substr(1, field.size() - 2);
        out.push_back(field);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

RecordView parse_fields(std::span<const std::string_view> fields, const FieldLayout& layout,
                        std::size_t row, std::string_view file) {
    auto get = [&](FieldLayout::Field f) -> std::string_view {
        const std::size_t i = layout.index[f];
        if (i >= fields.size())
            throw ParseError(std::string(file), row, layout.name[f], "missing column");
        return fields[i];
    };
    RecordView r;
    r.sender = get(FieldLayout::From);
    if (r.sender.empty()) throw ParseError(std::string(file), row, layout.name[FieldLayout::From], "empty address");
    r.receiver = get(FieldLayout::To);
    if (r.receiver.empty()) throw ParseError(std::string(file), row, layout.name[FieldLayout::To], "empty address");

    auto flag = [&](FieldLayout::Field f) {
        auto text = get(f);
        auto v = parse_flag(text);
        if (!v)
            throw ParseError(std::string(file), row, layout.name[f],
                             "flag must be 0/1 or false/true, got '" + std::string(text) + "'");
        return *v;
    };
    r.sender_is_contract = flag(FieldLayout::FromIsContract);
    r.receiver_is_contract = flag(FieldLayout::ToIsContract);

    auto ts_text = get(FieldLayout::TimestampCol);
    auto ts = parse_int(ts_text);
    if (!ts)
        throw ParseError(std::string(file), row, layout.name[FieldLayout::TimestampCol],
                         "timestamp is not a base-10 integer: '" + std::string(ts_text) + "'");
    if (*ts < 0)
        throw ParseError(std::string(file), row, layout.name[FieldLayout::TimestampCol],
                         "negative timestamp");
    r.timestamp = *ts;
    return r;
}

TransferRecord parse_record(std::span<const std::string_view> fields, const FieldLayout& layout,
                            std::size_t row, std::string_view file) {
    RecordView v = parse_fields(fields, layout, row, file);
    return TransferRecord{std::string(v.sender), std::string(v.receiver), v.sender_is_contract,
                          v.receiver_is_contract, v.timestamp};
}

TransferRecord parse_record(std::span<const std::string_view> fields, const IngestConfig& cfg,
                            std::size_t row) {
    return parse_record(fields, FieldLayout::positional(cfg.columns), row);
}

std::string to_utc_date(Timestamp ts) {
    using namespace std::chrono;
    const sys_days day = floor<days>(sys_seconds{seconds{ts}});
    const year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Timestamp from_utc_date(std::string_view date) {
    using namespace std::chrono;
    if (date.size() != 10 || date[4] != '-' || date[7] != '-')
        throw ConfigError("expected a YYYY-MM-DD date, got '" + std::string(date) + "'");
    auto y = parse_int(date.substr(0, 4));
    auto m = parse_int(date.substr(5, 2));
    auto d = parse_int(date.substr(8, 2));
    if (!y || !m || !d) throw ConfigError("expected a YYYY-MM-DD date, got '" + std::string(date) + "'");
    const year_month_day ymd{year{static_cast<int>(*y)}, month{static_cast<unsigned>(*m)},
                             day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) throw ConfigError("invalid calendar date '" + std::string(date) + "'");
    return sys_seconds{sys_days{ymd}}.time_since_epoch().count();
}

std::vector<fs::path> expand_inputs(std::span<const fs::path> paths) {
    std::vector<fs::path> out;
    for (const auto& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> shard;
            for (const auto& entry : fs::directory_iterator(p, ec))
                if (entry.is_regular_file()) shard.push_back(entry.path());
            if (ec) throw IoError("cannot list directory " + p.string() + ": " + ec.message());
            std::sort(shard.begin(), shard.end());
            out.insert(out.end(), shard.begin(), shard.end());
        } else if (fs::is_regular_file(p, ec)) {
            out.push_back(p);
        } else {
            throw IoError("input not found: " + p.string());
        }
    }
    return out;
}

ReadStats for_each_record(std::span<const fs::path> inputs, const IngestConfig& cfg,
                          const std::function<void(const RecordView&)>& visit) {
    cfg.validate();
    ReadStats stats;
    std::string line;
    for (const auto& path : expand_inputs(inputs)) {
        LineReader reader(path);
        const std::string file = path.string();
        std::size_t row = 0;
        FieldLayout layout = FieldLayout::positional(cfg.columns);
        if (cfg.has_header) {
            if (!reader.next(line)) continue;
            ++row;
            auto header = split_fields(line, cfg.delimiter);
            try {
                layout = FieldLayout::resolve(cfg.columns, header);
            } catch (const ParseError& e) {
                throw ParseError(file, 1, e.column(), "column not present in header");
            }
        }
        while (reader.next(line)) {
            ++row;
            if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
            ++stats.rows_read;
            auto fields = split_fields(line, cfg.delimiter);
            RecordView rec;
            try {
                rec = parse_fields(fields, layout, row, file);
            } catch (const ParseError&) {
                if (cfg.strictness == Strictness::FailFast) throw;
                ++stats.malformed_rows;
                continue;
            }
            visit(rec);
        }
    }
    return stats;
}

std::uint64_t DatasetSummary::category_total(Category c) const {
    std::uint64_t sum = 0;
    for (const auto& p : counts) sum += p[static_cast<std::size_t>(c)];
    return sum;
}

Census::Census(PeriodPartition partition)
    : partition_(std::move(partition)),
      counts_(static_cast<std::size_t>(partition_.count()), std::array<std::uint64_t, 4>{}) {}

void Census::add(Category c, Timestamp ts) {
    ++rows_read_;
    min_ts_ = min_ts_ ? std::min(*min_ts_, ts) : ts;
    max_ts_ = max_ts_ ? std::max(*max_ts_, ts) : ts;
    if (auto p = partition_.period_of(ts))
        ++counts_[static_cast<std::size_t>(*p - 1)][static_cast<std::size_t>(c)];
    else
        ++out_of_span_;
}

void Census::merge(const Census& other) {
    if (!std::equal(partition_.boundaries().begin(), partition_.boundaries().end(),
                    other.partition_.boundaries().begin(), other.partition_.boundaries().end()))
        throw std::invalid_argument("cannot merge censuses built on different partitions");
    for (std::size_t p = 0; p < counts_.size(); ++p)
        for (std::size_t c = 0; c < 4; ++c) counts_[p][c] += other.counts_[p][c];
    rows_read_ += other.rows_read_;
    malformed_ += other.malformed_;
    out_of_span_ += other.out_of_span_;
    if (other.min_ts_) min_ts_ = min_ts_ ? std::min(*min_ts_, *other.min_ts_) : *other.min_ts_;
    if (other.max_ts_) max_ts_ = max_ts_ ? std::max(*max_ts_, *other.max_ts_) : *other.max_ts_;
}

DatasetSummary Census::summary() const {
    DatasetSummary s;
    s.counts = counts_;
    s.boundaries.assign(partition_.boundaries().begin(), partition_.boundaries().end());
    for (const auto& p : counts_)
        for (auto v : p) s.total += v;
    s.rows_read = rows_read_;
    s.malformed_rows = malformed_;
    s.out_of_span_rows = out_of_span_;
    s.min_ts = min_ts_;
    s.max_ts = max_ts_;
    return s;
}

PeriodPartition make_partition(const PeriodSpec& spec, Timestamp min_ts, Timestamp max_ts) {
    if (!spec.boundaries.empty()) return PeriodPartition::from_boundaries(spec.boundaries);
    if (max_ts + 1 - min_ts < spec.k)
        throw ConfigError("observed time span (" + std::to_string(max_ts + 1 - min_ts) +
                          " s) is shorter than the number of periods");
    return PeriodPartition::equal(min_ts, max_ts + 1, spec.k);
}

DatasetSummary census_records(std::span<const TransferRecord> records, const PeriodPartition& partition) {
    Census census(partition);
    for (const auto& r : records) census.add(r.category(), r.timestamp);
    return census.summary();
}

namespace {

DatasetSummary empty_summary(const PeriodSpec& spec, const ReadStats& stats) {
    DatasetSummary s;
    const int k = spec.boundaries.empty() ? spec.k : static_cast<int>(spec.boundaries.size()) - 1;
    s.counts.assign(static_cast<std::size_t>(k), std::array<std::uint64_t, 4>{});
    s.boundaries = spec.boundaries;
    s.rows_read = stats.rows_read;
    s.malformed_rows = stats.malformed_rows;
    return s;
}

}  // namespace

DatasetSummary ingest_census(std::span<const fs::path> inputs, const IngestConfig& cfg) {
    cfg.validate();
    std::optional<PeriodPartition> partition;
    if (!cfg.periods.boundaries.empty()) {
        partition = PeriodPartition::from_boundaries(cfg.periods.boundaries);
    } else {
        std::optional<Timestamp> lo, hi;
        auto stats = for_each_record(inputs, cfg, [&](const RecordView& r) {
            lo = lo ? std::min(*lo, r.timestamp) : r.timestamp;
            hi = hi ? std::max(*hi, r.timestamp) : r.timestamp;
        });
        if (!lo) return empty_summary(cfg.periods, stats);
        partition = make_partition(cfg.periods, *lo, *hi);
    }
    Census census(*partition);
    auto stats = for_each_record(inputs, cfg, [&](const RecordView& r) { census.add(r.category(), r.timestamp); });
    DatasetSummary s = census.summary();
    s.rows_read = stats.rows_read;
    s.malformed_rows = stats.malformed_rows;
    return s;
}

Ledger load_ledger(std::span<const fs::path> inputs, const IngestConfig& cfg) {
    Ledger ledger;
    ledger.stats = for_each_record(inputs, cfg, [&](const RecordView& r) {
        Transfer t{ledger.accounts.intern(r.sender), ledger.accounts.intern(r.receiver), r.timestamp};
        ledger.records[static_cast<std::size_t>(r.category())].push_back(t);
        ledger.min_ts = ledger.min_ts ? std::min(*ledger.min_ts, r.timestamp) : r.timestamp;
        ledger.max_ts = ledger.max_ts ? std::max(*ledger.max_ts, r.timestamp) : r.timestamp;
    });
    return ledger;
}

DatasetSummary census_ledger(const Ledger& ledger, const PeriodPartition& partition) {
    Census census(partition);
    for (Category c : kAllCategories)
        for (const auto& t : ledger.records[static_cast<std::size_t>(c)]) census.add(c, t.timestamp);
    DatasetSummary s = census.summary();
    s.rows_read = ledger.stats.rows_read;
    s.malformed_rows = ledger.stats.malformed_rows;
    return s;
}

std::vector<Transfer> slice_of(const Ledger& ledger, Category c, const PeriodPartition& partition, int period) {
    const Timestamp lo = partition.period_start(period);
    const Timestamp hi = partition.period_end(period);
    std::vector<Transfer> out;
    for (const auto& t : ledger.records[static_cast<std::size_t>(c)])
        if (t.timestamp >= lo && t.timestamp < hi) out.push_back(t);
    return out;
}

}  // namespace tokscale
