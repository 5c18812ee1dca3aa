#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tokscale/aggregation.hpp"

namespace tokscale {

/// One (N, V) observation. Real-valued so that exact constructions such as
/// V = N^0.67 can be expressed.
struct ScatterPoint {
    double partners = 0.0;
    double volume = 0.0;
};

struct LogBin {
    double lower = 0.0;      // bin edge, inclusive
    double upper = 0.0;      // bin edge, exclusive except for the last bin
    double abscissa = 0.0;   // mean N of the points in the bin
    double mean_volume = 0.0;
    std::size_t count = 0;
};

/// Occupied geometric bins of an (N, V) scatter, ascending in N.
struct LogBinnedCurve {
    std::vector<LogBin> bins;
    int n_bins_requested = 20;
};

struct ScalingFit {
    double alpha = 0.0;
    double intercept = 0.0;  // C in log10 V = alpha log10 N + C
    double r2 = 0.0;
    double alpha_stderr = 0.0;
    std::size_t n_points = 0;
};

/// n_bins geometric intervals over [min N, max N]; bins are right-open
/// except the last. Empty bins are dropped. Throws InsufficientDataError on
/// an empty scatter and std::invalid_argument on non-positive N or n_bins < 1.
LogBinnedCurve log_bin(std::span<const ScatterPoint> points, int n_bins = 20);
LogBinnedCurve log_bin(std::span<const SenderProfile> profiles, int n_bins = 20);

/// OLS of log10(mean V) on log10(abscissa) over the occupied bins.
ScalingFit fit_alpha(const LogBinnedCurve& curve);

/// OLS of log10 V on log10 N over raw points, for comparison.
ScalingFit fit_alpha_raw(std::span<const ScatterPoint> points);

std::vector<ScatterPoint> to_scatter(std::span<const SenderProfile> profiles);

}  // namespace tokscale
