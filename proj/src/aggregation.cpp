#include "tokscale/aggregation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <string>

#include "tokscale/ingest.hpp"

namespace tokscale {

std::size_t HourWindow::hours() const noexcept {
    if (end <= start) return 0;
    return static_cast<std::size_t>((end - start + 3599) / 3600);
}

std::uint64_t HourlySeries::total() const noexcept {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

std::size_t HourlySeries::active_hours() const noexcept {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c != 0; }));
}

std::vector<SenderProfile> sender_profiles(std::span<const Transfer> slice) {
    std::vector<std::pair<AccountId, AccountId>> pairs;
    pairs.reserve(slice.size());
    for (const auto& t : slice) pairs.emplace_back(t.sender, t.receiver);
    std::sort(pairs.begin(), pairs.end());

    std::vector<SenderProfile> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (out.empty() || out.back().account != pairs[i].first) out.push_back({pairs[i].first, 0, 0});
        auto& p = out.back();
        ++p.volume;
        if (i == 0 || pairs[i] != pairs[i - 1]) ++p.partners;
    }
    return out;
}

std::vector<std::pair<AccountId, std::uint64_t>> role_counts(std::span<const Transfer> slice, Role role) {
    std::vector<AccountId> ids;
    ids.reserve(slice.size());
    for (const auto& t : slice) ids.push_back(account_of(t, role));
    std::sort(ids.begin(), ids.end());
    std::vector<std::pair<AccountId, std::uint64_t>> out;
    for (auto id : ids) {
        if (out.empty() || out.back().first != id) out.emplace_back(id, 0);
        ++out.back().second;
    }
    return out;
}

DegreeSample degree_sample(std::span<const Transfer> slice, Role role) {
    DegreeSample s{role, {}};
    for (const auto& [id, n] : role_counts(slice, role)) s.values.push_back(n);
    std::sort(s.values.begin(), s.values.end());
    return s;
}

namespace {

void bin_into(HourlySeries& series, Timestamp ts, const HourWindow& window) {
    if (ts < window.start || ts >= window.end) return;
    ++series.counts[static_cast<std::size_t>((ts - window.start) / 3600)];
}

}  // namespace

HourlySeries hourly_series(std::span<const Transfer> slice, AccountId account, Role role,
                           const HourWindow& window) {
    HourlySeries s{account, role, std::vector<std::uint32_t>(window.hours(), 0)};
    for (const auto& t : slice)
        if (account_of(t, role) == account) bin_into(s, t.timestamp, window);
    return s;
}

void for_each_hourly_series(std::span<const Transfer> slice, Role role, const HourWindow& window,
                            const std::function<void(const HourlySeries&)>& visit) {
    std::vector<std::pair<AccountId, Timestamp>> events;
    events.reserve(slice.size());
    for (const auto& t : slice) events.emplace_back(account_of(t, role), t.timestamp);
    std::sort(events.begin(), events.end());

    HourlySeries s{0, role, std::vector<std::uint32_t>(window.hours(), 0)};
    std::size_t i = 0;
    while (i < events.size()) {
        s.account = events[i].first;
        std::fill(s.counts.begin(), s.counts.end(), 0u);
        for (; i < events.size() && events[i].first == s.account; ++i) bin_into(s, events[i].second, window);
        visit(s);
    }
}

namespace {

std::uint64_t parse_u64(std::string_view text, const std::filesystem::path& path, std::size_t row) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ParseError(path.string(), row, "", "expected a non-negative integer, got '" + std::string(text) + "'");
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return in;
}

}  // namespace

void write_profile_spill(const std::filesystem::path& path, std::span<const SenderProfile> profiles,
                         const AccountTable& accounts) {
    std::vector<const SenderProfile*> rows;
    for (const auto& p : profiles) rows.push_back(&p);
    std::sort(rows.begin(), rows.end(), [&](auto* a, auto* b) { return accounts.name(a->account) < accounts.name(b->account); });
    auto out = open_out(path);
    out << "account_id,V,N\n";
    for (auto* p : rows) out << accounts.name(p->account) << ',' << p->volume << ',' << p->partners << '\n';
}

std::vector<SenderProfile> read_profile_spill(const std::filesystem::path& path, AccountTable& accounts) {
    auto in = open_in(path);
    std::string line;
    std::vector<SenderProfile> out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (++row == 1) continue;
        auto f = split_fields(line, ',');
        if (f.size() != 3) throw ParseError(path.string(), row, "", "expected 3 fields");
        out.push_back({accounts.intern(f[0]), parse_u64(f[1], path, row), parse_u64(f[2], path, row)});
    }
    return out;
}

void write_hourly_spill(const std::filesystem::path& path, std::span<const HourlySeries> series,
                        const AccountTable& accounts) {
    std::vector<const HourlySeries*> rows;
    for (const auto& s : series) rows.push_back(&s);
    std::sort(rows.begin(), rows.end(), [&](auto* a, auto* b) { return accounts.name(a->account) < accounts.name(b->account); });
    auto out = open_out(path);
    out << "account_id,hour_index,count\n";
    for (auto* s : rows)
        for (std::size_t h = 0; h < s->counts.size(); ++h)
            if (s->counts[h] != 0) out << accounts.name(s->account) << ',' << h << ',' << s->counts[h] << '\n';
}

std::vector<HourlySeries> read_hourly_spill(const std::filesystem::path& path, AccountTable& accounts,
                                            Role role, std::size_t hours) {
    auto in = open_in(path);
    std::string line;
    std::map<AccountId, HourlySeries> by_account;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (++row == 1) continue;
        auto f = split_fields(line, ',');
        if (f.size() != 3) throw ParseError(path.string(), row, "", "expected 3 fields");
        const AccountId id = accounts.intern(f[0]);
        const auto h = parse_u64(f[1], path, row);
        if (h >= hours) throw ParseError(path.string(), row, "hour_index", "hour index outside the window");
        auto [it, fresh] = by_account.try_emplace(id, HourlySeries{id, role, std::vector<std::uint32_t>(hours, 0)});
        it->second.counts[h] = static_cast<std::uint32_t>(parse_u64(f[2], path, row));
    }
    std::vector<HourlySeries> out;
    for (auto& [id, s] : by_account) out.push_back(std::move(s));
    return out;
}

}  // namespace tokscale
