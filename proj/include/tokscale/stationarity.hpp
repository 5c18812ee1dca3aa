#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tokscale/aggregation.hpp"

namespace tokscale {

enum class KpssVariant { Level, Trend };

std::string_view to_string(KpssVariant v) noexcept;
std::optional<KpssVariant> parse_kpss_variant(std::string_view name) noexcept;

/// Automatic lag truncation rule, or a fixed lag.
struct KpssBandwidth {
    enum class Rule { NeweyWest, Schwert, Fixed };
    Rule rule = Rule::NeweyWest;
    std::size_t lag = 0;  // used by Rule::Fixed

    static KpssBandwidth newey_west() { return {Rule::NeweyWest, 0}; }
    static KpssBandwidth schwert() { return {Rule::Schwert, 0}; }
    static KpssBandwidth fixed(std::size_t l) { return {Rule::Fixed, l}; }
};

/// Intermediate quantities of one KPSS evaluation.
struct KpssWork {
    std::vector<double> residuals;
    std::vector<double> partial_sums;
    std::size_t bandwidth = 0;
    double long_run_variance = 0.0;
};

struct KpssResult {
    double lm_statistic = 0.0;
    std::size_t bandwidth = 0;
    /// Interpolated in the critical-value table, clamped to [0.01, 0.10].
    double p_value = 0.10;
    bool p_value_clamped = false;
    bool stationary_at_5pct = true;
    /// Zero-variance input: lm = 0 and stationary by convention.
    bool degenerate = false;
};

inline constexpr std::size_t kKpssMinLength = 10;

/// Residuals of the series regressed on a constant (level) or a constant and
/// linear trend.
std::vector<double> kpss_residuals(std::span<const double> series, KpssVariant variant);

/// Bartlett weight 1 - s / (l + 1).
inline double bartlett_weight(std::size_t s, std::size_t l) {
    return 1.0 - static_cast<double>(s) / static_cast<double>(l + 1);
}

/// s^2(l) = (1/T) sum e_t^2 + (2/T) sum_{s=1..l} w(s,l) sum_{t>s} e_t e_{t-s}
double long_run_variance(std::span<const double> residuals, std::size_t lag);

/// Newey-West plug-in lag for the Bartlett kernel.
std::size_t newey_west_bandwidth(std::span<const double> residuals);

/// floor(4 (T/100)^(1/4))
std::size_t schwert_bandwidth(std::size_t length);

/// p-value for an LM statistic by linear interpolation in the tabulated
/// critical values; second member reports clamping.
std::pair<double, bool> kpss_p_value(double lm, KpssVariant variant);

KpssResult kpss_test(std::span<const double> series, KpssVariant variant = KpssVariant::Level,
                     KpssBandwidth bandwidth = KpssBandwidth::newey_west(), KpssWork* work = nullptr);

KpssResult kpss_test(const HourlySeries& series, KpssVariant variant = KpssVariant::Level,
                     KpssBandwidth bandwidth = KpssBandwidth::newey_west());

struct StationarityTally {
    std::size_t tested = 0;
    std::size_t stationary = 0;
    std::size_t skipped = 0;  // below the activity floor or too short
    std::size_t degenerate = 0;

    /// 100 * stationary / tested; nullopt when nothing was tested.
    std::optional<double> percentage() const;
};

struct StationarityConfig {
    std::size_t activity_floor = 10;
    KpssVariant variant = KpssVariant::Level;
    KpssBandwidth bandwidth = KpssBandwidth::newey_west();
};

/// Accumulates per-account verdicts. Counts commute, so accounts may be fed
/// in any order.
class StationarityCounter {
public:
    explicit StationarityCounter(StationarityConfig cfg = {}) : cfg_(cfg) {}
    void add(const HourlySeries& series);
    void merge(const StationarityCounter& other);
    const StationarityTally& tally() const noexcept { return tally_; }

private:
    StationarityConfig cfg_;
    StationarityTally tally_;
};

StationarityTally stationary_fraction(std::span<const HourlySeries> series_set,
                                      const StationarityConfig& cfg = {});

}  // namespace tokscale
