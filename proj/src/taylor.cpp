#include "tokscale/taylor.hpp"

#include <algorithm>
#include <cmath>

#include "tokscale/errors.hpp"
#include "tokscale/regression.hpp"

namespace tokscale {

std::pair<double, double> mean_variance(std::span<const std::uint32_t> counts) {
    const std::size_t n = counts.size();
    if (n < 2) throw InsufficientDataError("mean/variance needs at least two hour bins");
    double mean = 0.0;
    for (auto c : counts) mean += c;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (auto c : counts) ss += (c - mean) * (c - mean);
    return {mean, ss / static_cast<double>(n - 1)};
}

TaylorPoint mean_variance(const HourlySeries& series) {
    auto [mu, var] = mean_variance(series.counts);
    return {series.account, mu, var};
}

TaylorFit fit_taylor(std::span<const TaylorPoint> points) {
    std::vector<std::pair<double, double>> usable;
    for (const auto& p : points)
        if (p.mu > 0.0 && p.var > 0.0) usable.emplace_back(p.mu, p.var);
    std::sort(usable.begin(), usable.end());

    if (usable.size() < 3) throw InsufficientDataError("Taylor fit needs at least three accounts with mu, var > 0");
    if (usable.front().first == usable.back().first)
        throw InsufficientDataError("Taylor fit needs distinct account means");

    std::vector<double> x, y;
    x.reserve(usable.size());
    y.reserve(usable.size());
    for (const auto& [mu, var] : usable) {
        x.push_back(std::log10(mu));
        y.push_back(std::log10(var));
    }
    const LinearFit f = ordinary_least_squares(x, y);
    TaylorFit out;
    out.b = f.slope;
    out.log_a = f.intercept;
    out.a = std::pow(10.0, f.intercept);
    out.r2 = f.r2;
    out.b_stderr = f.slope_stderr;
    out.log_a_stderr = f.intercept_stderr;
    out.n_accounts = usable.size();
    out.excluded = points.size() - usable.size();
    return out;
}

void TaylorCollector::add(const HourlySeries& series) {
    if (series.active_hours() < floor_ || series.counts.size() < 2) return;
    points_.push_back(mean_variance(series));
}

TaylorCell TaylorCollector::finish() const {
    TaylorCell cell;
    cell.candidates = points_.size();
    try {
        cell.fit = fit_taylor(points_);
    } catch (const InsufficientDataError& e) {
        cell.absent_reason = e.what();
    }
    return cell;
}

}  // namespace tokscale
