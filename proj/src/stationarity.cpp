#include "tokscale/stationarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

#include "tokscale/errors.hpp"

namespace tokscale {

namespace {

// KPSS (1992) asymptotic critical values at 10%, 5%, 2.5%, 1%.
constexpr std::array<double, 4> kLevelCritical{0.347, 0.463, 0.574, 0.739};
constexpr std::array<double, 4> kTrendCritical{0.119, 0.146, 0.176, 0.216};
constexpr std::array<double, 4> kTailProbability{0.10, 0.05, 0.025, 0.01};

double autocovariance(std::span<const double> e, std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = lag; t < e.size(); ++t) s += e[t] * e[t - lag];
    return s / static_cast<double>(e.size());
}

}  // namespace

std::string_view to_string(KpssVariant v) noexcept {
    return v == KpssVariant::Level ? "level" : "trend";
}

std::optional<KpssVariant> parse_kpss_variant(std::string_view name) noexcept {
    if (name == "level") return KpssVariant::Level;
    if (name == "trend") return KpssVariant::Trend;
    return std::nullopt;
}

std::vector<double> kpss_residuals(std::span<const double> series, KpssVariant variant) {
    const std::size_t n = series.size();
    std::vector<double> e(series.begin(), series.end());
    if (n == 0) return e;
    double mean = 0.0;
    for (double y : series) mean += y;
    mean /= static_cast<double>(n);
    if (variant == KpssVariant::Level) {
        for (double& v : e) v -= mean;
        return e;
    }
    // Trend on t = 1..T, centred so the slope is decoupled from the mean.
    const double t_mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = static_cast<double>(i + 1) - t_mean;
        sxx += dt * dt;
        sxy += dt * (series[i] - mean);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    for (std::size_t i = 0; i < n; ++i)
        e[i] = series[i] - mean - slope * (static_cast<double>(i + 1) - t_mean);
    return e;
}

double long_run_variance(std::span<const double> residuals, std::size_t lag) {
    double s2 = autocovariance(residuals, 0);
    for (std::size_t s = 1; s <= lag && s < residuals.size(); ++s)
        s2 += 2.0 * bartlett_weight(s, lag) * autocovariance(residuals, s);
    return s2;
}

std::size_t newey_west_bandwidth(std::span<const double> residuals) {
    const std::size_t t_len = residuals.size();
    if (t_len < 2) return 0;
    const double t = static_cast<double>(t_len);
    const auto n_pre = std::min<std::size_t>(
        static_cast<std::size_t>(std::floor(4.0 * std::pow(t / 100.0, 2.0 / 9.0))), t_len - 1);
    double s0 = autocovariance(residuals, 0);
    double s1 = 0.0;
    for (std::size_t j = 1; j <= n_pre; ++j) {
        const double g = autocovariance(residuals, j);
        s0 += 2.0 * g;
        s1 += static_cast<double>(j) * g;
    }
    if (!(s0 > 0.0)) return 0;
    const double ratio = s1 / s0;
    const double gamma_hat = 1.1447 * std::cbrt(ratio * ratio * t);
    const double lag = std::floor(gamma_hat);
    return std::min(static_cast<std::size_t>(std::max(0.0, lag)), t_len - 1);
}

std::size_t schwert_bandwidth(std::size_t length) {
    return static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(length) / 100.0, 0.25)));
}

std::pair<double, bool> kpss_p_value(double lm, KpssVariant variant) {
    const auto& crit = variant == KpssVariant::Level ? kLevelCritical : kTrendCritical;
    if (lm <= crit.front()) return {kTailProbability.front(), lm < crit.front()};
    if (lm >= crit.back()) return {kTailProbability.back(), lm > crit.back()};
    std::size_t i = 1;
    while (lm > crit[i]) ++i;
    const double f = (lm - crit[i - 1]) / (crit[i] - crit[i - 1]);
    return {kTailProbability[i - 1] + f * (kTailProbability[i] - kTailProbability[i - 1]), false};
}

KpssResult kpss_test(std::span<const double> series, KpssVariant variant, KpssBandwidth bandwidth,
                     KpssWork* work) {
    const std::size_t t_len = series.size();
    if (t_len < kKpssMinLength)
        throw InsufficientDataError("KPSS needs a series of length >= " + std::to_string(kKpssMinLength));

    KpssResult result;
    std::vector<double> e = kpss_residuals(series, variant);

    double scale = 0.0;
    for (double v : e) scale = std::max(scale, std::abs(v));
    double ymax = 0.0;
    for (double y : series) ymax = std::max(ymax, std::abs(y));
    if (scale <= 1e-12 * std::max(1.0, ymax)) {
        result.degenerate = true;
        result.stationary_at_5pct = true;
        result.p_value = 0.10;
        result.p_value_clamped = true;
        if (work) *work = KpssWork{std::move(e), std::vector<double>(t_len, 0.0), 0, 0.0};
        return result;
    }

    switch (bandwidth.rule) {
        case KpssBandwidth::Rule::NeweyWest: result.bandwidth = newey_west_bandwidth(e); break;
        case KpssBandwidth::Rule::Schwert: result.bandwidth = std::min(schwert_bandwidth(t_len), t_len - 1); break;
        case KpssBandwidth::Rule::Fixed: result.bandwidth = std::min(bandwidth.lag, t_len - 1); break;
    }

    std::vector<double> partial(t_len);
    double running = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < t_len; ++t) {
        running += e[t];
        partial[t] = running;
        sum_sq += running * running;
    }
    const double s2 = long_run_variance(e, result.bandwidth);
    const double t = static_cast<double>(t_len);
    result.lm_statistic = s2 > 0.0 ? sum_sq / (t * t) / s2 : 0.0;
    std::tie(result.p_value, result.p_value_clamped) = kpss_p_value(result.lm_statistic, variant);
    result.stationary_at_5pct = result.p_value > 0.05;
    if (work) *work = KpssWork{std::move(e), std::move(partial), result.bandwidth, s2};
    return result;
}

KpssResult kpss_test(const HourlySeries& series, KpssVariant variant, KpssBandwidth bandwidth) {
    std::vector<double> y(series.counts.begin(), series.counts.end());
    return kpss_test(y, variant, bandwidth);
}

std::optional<double> StationarityTally::percentage() const {
    if (tested == 0) return std::nullopt;
    return 100.0 * static_cast<double>(stationary) / static_cast<double>(tested);
}

void StationarityCounter::add(const HourlySeries& series) {
    if (series.active_hours() < cfg_.activity_floor || series.counts.size() < kKpssMinLength) {
        ++tally_.skipped;
        return;
    }
    const KpssResult r = kpss_test(series, cfg_.variant, cfg_.bandwidth);
    ++tally_.tested;
    if (r.degenerate) ++tally_.degenerate;
    if (r.stationary_at_5pct) ++tally_.stationary;
}

void StationarityCounter::merge(const StationarityCounter& other) {
    tally_.tested += other.tally_.tested;
    tally_.stationary += other.tally_.stationary;
    tally_.skipped += other.tally_.skipped;
    tally_.degenerate += other.tally_.degenerate;
}

StationarityTally stationary_fraction(std::span<const HourlySeries> series_set, const StationarityConfig& cfg) {
    StationarityCounter counter(cfg);
    for (const auto& s : series_set) counter.add(s);
    return counter.tally();
}

}  // namespace tokscale
