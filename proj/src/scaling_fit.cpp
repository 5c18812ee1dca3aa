#include "tokscale/scaling_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tokscale/errors.hpp"
#include "tokscale/regression.hpp"

namespace tokscale {

std::vector<ScatterPoint> to_scatter(std::span<const SenderProfile> profiles) {
    std::vector<ScatterPoint> pts;
    pts.reserve(profiles.size());
    for (const auto& p : profiles)
        pts.push_back({static_cast<double>(p.partners), static_cast<double>(p.volume)});
    return pts;
}

LogBinnedCurve log_bin(std::span<const ScatterPoint> points, int n_bins) {
    if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
    if (points.empty()) throw InsufficientDataError("cannot bin an empty profile set");

    double lo = points.front().partners, hi = lo;
    for (const auto& p : points) {
        if (!(p.partners > 0.0)) throw std::invalid_argument("partner counts must be positive");
        lo = std::min(lo, p.partners);
        hi = std::max(hi, p.partners);
    }

    LogBinnedCurve curve;
    curve.n_bins_requested = n_bins;
    const int nb = lo == hi ? 1 : n_bins;

    std::vector<double> edges(static_cast<std::size_t>(nb) + 1);
    const double ratio = hi / lo;
    for (int i = 0; i <= nb; ++i) edges[static_cast<std::size_t>(i)] = lo * std::pow(ratio, static_cast<double>(i) / nb);
    edges.front() = lo;
    edges.back() = hi;

    std::vector<double> sum_n(static_cast<std::size_t>(nb), 0.0), sum_v(static_cast<std::size_t>(nb), 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(nb), 0);
    for (const auto& p : points) {
        auto it = std::upper_bound(edges.begin(), edges.end(), p.partners);
        auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - edges.begin()) - 1));
        idx = std::min(idx, static_cast<std::size_t>(nb - 1));
        sum_n[idx] += p.partners;
        sum_v[idx] += p.volume;
        ++count[idx];
    }
    for (std::size_t i = 0; i < count.size(); ++i) {
        if (count[i] == 0) continue;
        const double c = static_cast<double>(count[i]);
        curve.bins.push_back({edges[i], edges[i + 1], sum_n[i] / c, sum_v[i] / c, count[i]});
    }
    return curve;
}

LogBinnedCurve log_bin(std::span<const SenderProfile> profiles, int n_bins) {
    const auto pts = to_scatter(profiles);
    return log_bin(pts, n_bins);
}

namespace {

ScalingFit from_linear(const LinearFit& f) {
    return {f.slope, f.intercept, f.r2, f.slope_stderr, f.n};
}

}  // namespace

ScalingFit fit_alpha(const LogBinnedCurve& curve) {
    std::vector<double> x, y;
    for (const auto& b : curve.bins) {
        x.push_back(std::log10(b.abscissa));
        y.push_back(std::log10(b.mean_volume));
    }
    if (x.size() < 2) throw InsufficientDataError("scaling fit needs at least two occupied bins");
    return from_linear(ordinary_least_squares(x, y));
}

ScalingFit fit_alpha_raw(std::span<const ScatterPoint> points) {
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& p : points) {
        x.push_back(std::log10(p.partners));
        y.push_back(std::log10(p.volume));
    }
    return from_linear(ordinary_least_squares(x, y));
}

}  // namespace tokscale
