#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokscale {

using Timestamp = std::int64_t;

/// Sender/receiver account-type pair of a transfer.
enum class Category : std::uint8_t { EOA_EOA = 0, EOA_SC = 1, SC_EOA = 2, SC_SC = 3 };

inline constexpr std::array<Category, 4> kAllCategories{Category::EOA_EOA, Category::EOA_SC,
                                                        Category::SC_EOA, Category::SC_SC};

enum class Role : std::uint8_t { Sender = 0, Receiver = 1 };

inline constexpr std::array<Role, 2> kAllRoles{Role::Sender, Role::Receiver};

struct TransferRecord {
    std::string sender_id;
    std::string receiver_id;
    bool sender_is_contract = false;
    bool receiver_is_contract = false;
    Timestamp timestamp = 0;

    Category category() const noexcept;
};

constexpr Category classify(bool sender_is_contract, bool receiver_is_contract) noexcept {
    return static_cast<Category>((sender_is_contract ? 2 : 0) | (receiver_is_contract ? 1 : 0));
}

inline Category TransferRecord::category() const noexcept {
    return classify(sender_is_contract, receiver_is_contract);
}

std::string_view to_string(Category c) noexcept;
std::string_view to_string(Role r) noexcept;
std::optional<Category> parse_category(std::string_view name) noexcept;
std::optional<Role> parse_role(std::string_view name) noexcept;

/// Contiguous left-closed/right-open tiling of [start, end) into k periods.
/// Period indices are 1-based, as in "Period 1".
class PeriodPartition {
public:
    /// k periods of equal length; the last absorbs the remainder when
    /// (end - start) is not divisible by k.
    static PeriodPartition equal(Timestamp start, Timestamp end, int k);
    /// Explicit boundaries b0 < b1 < ... < bk.
    static PeriodPartition from_boundaries(std::vector<Timestamp> boundaries);

    Timestamp start() const noexcept { return boundaries_.front(); }
    Timestamp end() const noexcept { return boundaries_.back(); }
    int count() const noexcept { return static_cast<int>(boundaries_.size()) - 1; }
    std::span<const Timestamp> boundaries() const noexcept { return boundaries_; }

    Timestamp period_start(int period) const { return boundaries_.at(period - 1); }
    Timestamp period_end(int period) const { return boundaries_.at(period); }

    /// Period index in [1, k], or nullopt when ts lies outside [start, end).
    std::optional<int> period_of(Timestamp ts) const noexcept;

private:
    explicit PeriodPartition(std::vector<Timestamp> b) : boundaries_(std::move(b)) {}
    std::vector<Timestamp> boundaries_;
};

inline std::optional<int> period_of(Timestamp ts, const PeriodPartition& partition) noexcept {
    return partition.period_of(ts);
}

/// Dense account handle; the text address lives in an AccountTable.
using AccountId = std::uint32_t;

/// A classified transfer with interned account handles.
struct Transfer {
    AccountId sender = 0;
    AccountId receiver = 0;
    Timestamp timestamp = 0;
};

/// Interns text addresses into dense ids in first-seen order.
class AccountTable {
public:
    AccountId intern(std::string_view address);
    std::optional<AccountId> find(std::string_view address) const;
    const std::string& name(AccountId id) const { return names_.at(id); }
    std::size_t size() const noexcept { return names_.size(); }

    /// Ids sorted by their text address; used wherever output order matters.
    std::vector<AccountId> sorted_by_name() const;

private:
    // deque keeps element addresses stable, so the index can hold views.
    std::deque<std::string> names_;
    std::unordered_map<std::string_view, AccountId> index_;
};

}  // namespace tokscale
