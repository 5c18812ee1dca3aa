#pragma once

#include <cstddef>
#include <span>

namespace tokscale {

/// Unweighted least squares y = intercept + slope * x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    std::size_t n = 0;
};

/// Throws InsufficientDataError for fewer than two points or constant x.
/// Standard errors are zero when n == 2.
LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace tokscale
