#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tokscale/aggregation.hpp"

namespace tokscale {

/// Mean and unbiased variance of one account's hourly counts.
struct TaylorPoint {
    AccountId account = 0;
    double mu = 0.0;
    double var = 0.0;
};

/// log10 var = log_a + b log10 mu
struct TaylorFit {
    double b = 0.0;
    double log_a = 0.0;
    double a = 0.0;
    double r2 = 0.0;
    double b_stderr = 0.0;
    double log_a_stderr = 0.0;
    std::size_t n_accounts = 0;
    std::size_t excluded = 0;  // points with mu == 0 or var == 0
};

/// (mean, variance with denominator T - 1) over all T bins, zeros included.
/// Throws InsufficientDataError for T < 2.
std::pair<double, double> mean_variance(std::span<const std::uint32_t> counts);
TaylorPoint mean_variance(const HourlySeries& series);

/// OLS of log10 var on log10 mu after dropping non-positive points. Points
/// are put in a canonical order first, so the result does not depend on the
/// order they arrive in. Throws InsufficientDataError for fewer than three
/// usable points or a single distinct mu.
TaylorFit fit_taylor(std::span<const TaylorPoint> points);

struct TaylorCell {
    std::optional<TaylorFit> fit;
    std::size_t candidates = 0;  // accounts passing the activity floor
    std::string absent_reason;
};

/// Builds the Taylor points of a slice: accounts with at least
/// `activity_floor` non-zero hours.
class TaylorCollector {
public:
    explicit TaylorCollector(std::size_t activity_floor = 10) : floor_(activity_floor) {}
    void add(const HourlySeries& series);
    std::span<const TaylorPoint> points() const noexcept { return points_; }
    TaylorCell finish() const;

private:
    std::size_t floor_;
    std::vector<TaylorPoint> points_;
};

}  // namespace tokscale
