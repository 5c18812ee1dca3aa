#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "tokscale/core_model.hpp"

namespace tokscale {

/// Per-sender trade volume V (rows sent) and partner diversity N (distinct
/// receivers) within one slice. 1 <= N <= V.
struct SenderProfile {
    AccountId account = 0;
    std::uint64_t volume = 0;
    std::uint64_t partners = 0;

    bool operator==(const SenderProfile&) const = default;
};

/// Per-account trade counts for one role within one slice, ascending.
struct DegreeSample {
    Role role = Role::Sender;
    std::vector<std::uint64_t> values;
};

/// Half-open window anchored at the period start; hour h covers
/// [start + 3600h, start + 3600(h+1)).
struct HourWindow {
    Timestamp start = 0;
    Timestamp end = 0;

    std::size_t hours() const noexcept;
};

struct HourlySeries {
    AccountId account = 0;
    Role role = Role::Sender;
    std::vector<std::uint32_t> counts;

    std::uint64_t total() const noexcept;
    std::size_t active_hours() const noexcept;
};

inline AccountId account_of(const Transfer& t, Role role) noexcept {
    return role == Role::Sender ? t.sender : t.receiver;
}

/// One profile per distinct sender, ordered by account id.
std::vector<SenderProfile> sender_profiles(std::span<const Transfer> slice);

/// (account, trade count) for every account active in `role`, ordered by account id.
std::vector<std::pair<AccountId, std::uint64_t>> role_counts(std::span<const Transfer> slice, Role role);

DegreeSample degree_sample(std::span<const Transfer> slice, Role role);

/// Hourly counts for one account. An account absent from the slice yields
/// an all-zero series of the full window length.
HourlySeries hourly_series(std::span<const Transfer> slice, AccountId account, Role role,
                           const HourWindow& window);

/// Builds every active account's series one at a time, in account-id order,
/// so memory stays at one series regardless of population size.
void for_each_hourly_series(std::span<const Transfer> slice, Role role, const HourWindow& window,
                            const std::function<void(const HourlySeries&)>& visit);

/// Spill files: `account_id,V,N` and `account_id,hour_index,count` (non-zero
/// bins only), rows ordered by account name.
void write_profile_spill(const std::filesystem::path& path, std::span<const SenderProfile> profiles,
                         const AccountTable& accounts);
std::vector<SenderProfile> read_profile_spill(const std::filesystem::path& path, AccountTable& accounts);

void write_hourly_spill(const std::filesystem::path& path, std::span<const HourlySeries> series,
                        const AccountTable& accounts);
std::vector<HourlySeries> read_hourly_spill(const std::filesystem::path& path, AccountTable& accounts,
                                            Role role, std::size_t hours);

}  // namespace tokscale
