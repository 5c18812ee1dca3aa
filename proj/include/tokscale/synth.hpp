#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "tokscale/aggregation.hpp"
#include "tokscale/core_model.hpp"
#include "tokscale/random.hpp"

namespace tokscale {

using Seed = std::uint64_t;

/// Exact inverse-CDF sampler for the discrete power law. Survival values
/// for the first few thousand support points are tabulated; draws beyond
/// the table fall back to doubling-then-bisection on the Hurwitz tail.
class PowerLawSampler {
public:
    PowerLawSampler(double gamma, std::uint64_t x_min);

    /// Smallest x >= x_min with P(X <= x) >= u, for u in [0, 1).
    std::uint64_t quantile(double u) const;
    std::uint64_t operator()(Rng& rng) const { return quantile(rng.uniform()); }

    double gamma() const noexcept { return gamma_; }
    std::uint64_t x_min() const noexcept { return x_min_; }

private:
    double survival(std::uint64_t x) const;  // P(X > x)

    double gamma_;
    std::uint64_t x_min_;
    double zeta_norm_;
    std::vector<double> table_;  // table_[i] = P(X > x_min + i)
};

std::vector<std::uint64_t> sample_discrete_powerlaw(double gamma, std::uint64_t x_min, std::size_t n, Seed seed);

/// x_min + Geometric: P(x) = (1 - e^-lambda) e^{-lambda (x - x_min)}.
std::vector<std::uint64_t> sample_discrete_exponential(double lambda, std::uint64_t x_min, std::size_t n,
                                                       Seed seed);

/// Account i gets independent Poisson(rates[i]) counts per hour, T hours.
std::vector<HourlySeries> gen_poisson_accounts(std::span<const double> rates, std::size_t hours, Seed seed);

/// counts_t = Poisson(rate_i * f_t), f_t ~ Gamma(1/c, c) shared by all
/// accounts (f_t = 1 when c = 0), so var = mu + c mu^2.
std::vector<HourlySeries> gen_common_mode_accounts(std::span<const double> rates, double common_variance,
                                                   std::size_t hours, Seed seed);

/// Cumulative sum of i.i.d. N(0, step_sd^2) steps.
std::vector<double> gen_random_walk(std::size_t length, double step_sd, Seed seed);

/// Random walk rounded to integers and floored at zero (count-like series).
HourlySeries gen_count_random_walk(AccountId account, std::size_t length, double step_sd, double start, Seed seed);

/// Per-category generator settings. Either a flat per-period row quota, or a
/// structured population in which each sender draws its partner count N from
/// a discrete power law and sends `trades_per_partner` trades to each partner
/// (so V = trades_per_partner * N exactly).
struct CategoryScenario {
    std::vector<std::uint64_t> rows;  // flat quota per period (empty if structured)
    std::size_t senders = 0;
    std::size_t receivers = 0;
    double gamma = 0.0;
    std::uint64_t x_min = 1;
    std::uint64_t trades_per_partner = 1;

    bool structured() const noexcept { return gamma > 0.0; }
};

struct ScenarioSpec {
    Timestamp start_ts = 1500000000;
    Timestamp period_seconds = 30 * 24 * 3600;
    int periods = 1;
    std::optional<Seed> seed;
    std::array<std::optional<CategoryScenario>, 4> categories;

    /// Field-level validation; throws ConfigError naming the offending field.
    void validate() const;

    static ScenarioSpec from_json(const nlohmann::json& j);
    nlohmann::ordered_json to_json() const;
    std::vector<Timestamp> boundaries() const;
};

struct FabricatedLedger {
    std::vector<TransferRecord> rows;  // shuffled
    nlohmann::ordered_json sidecar;
};

FabricatedLedger fabricate(const ScenarioSpec& spec, Seed seed);

/// Writes the ledger in the default ingest format and its JSON sidecar.
void write_ledger(const std::filesystem::path& path, std::span<const TransferRecord> rows);
void fabricate_ledger(const ScenarioSpec& spec, Seed seed, const std::filesystem::path& ledger_path,
                      const std::filesystem::path& sidecar_path);

}  // namespace tokscale
