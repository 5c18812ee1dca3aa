#include "tokscale/core_model.hpp"

#include <algorithm>

namespace tokscale {

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::EOA_EOA: return "EOA_EOA";
        case Category::EOA_SC: return "EOA_SC";
        case Category::SC_EOA: return "SC_EOA";
        case Category::SC_SC: return "SC_SC";
    }
    return "?";
}

std::string_view to_string(Role r) noexcept {
    return r == Role::Sender ? "sender" : "receiver";
}

std::optional<Category> parse_category(std::string_view name) noexcept {
    for (Category c : kAllCategories)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

std::optional<Role> parse_role(std::string_view name) noexcept {
    for (Role r : kAllRoles)
        if (to_string(r) == name) return r;
    return std::nullopt;
}

PeriodPartition PeriodPartition::equal(Timestamp start, Timestamp end, int k) {
    if (k < 1) throw std::invalid_argument("period count must be >= 1");
    if (end - start < k)
        throw std::invalid_argument("time span too short for the requested number of periods");
    std::vector<Timestamp> b(static_cast<std::size_t>(k) + 1);
    const Timestamp step = (end - start) / k;
    for (int i = 0; i < k; ++i) b[static_cast<std::size_t>(i)] = start + step * i;
    b.back() = end;
    return PeriodPartition(std::move(b));
}

PeriodPartition PeriodPartition::from_boundaries(std::vector<Timestamp> boundaries) {
    if (boundaries.size() < 2)
        throw std::invalid_argument("a partition needs at least two boundaries");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (boundaries[i] <= boundaries[i - 1])
            throw std::invalid_argument("partition boundaries must be strictly ascending");
    return PeriodPartition(std::move(boundaries));
}

std::optional<int> PeriodPartition::period_of(Timestamp ts) const noexcept {
    if (ts < boundaries_.front() || ts >= boundaries_.back()) return std::nullopt;
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), ts);
    return static_cast<int>(it - boundaries_.begin());
}

AccountId AccountTable::intern(std::string_view address) {
    if (auto it = index_.find(address); it != index_.end()) return it->second;
    const auto id = static_cast<AccountId>(names_.size());
    names_.emplace_back(address);
    index_.emplace(names_.back(), id);
    return id;
}

std::optional<AccountId> AccountTable::find(std::string_view address) const {
    if (auto it = index_.find(address); it != index_.end()) return it->second;
    return std::nullopt;
}

std::vector<AccountId> AccountTable::sorted_by_name() const {
    std::vector<AccountId> ids(names_.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<AccountId>(i);
    std::sort(ids.begin(), ids.end(),
              [this](AccountId a, AccountId b) { return names_[a] < names_[b]; });
    return ids;
}

}  // namespace tokscale
