#include "tokscale/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tokscale/errors.hpp"

namespace tokscale {

LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw InsufficientDataError("least squares needs at least two points");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InsufficientDataError("least squares needs at least two distinct x values");

    LinearFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    if (n > 2) {
        const double sigma2 = ss_res / static_cast<double>(n - 2);
        fit.slope_stderr = std::sqrt(sigma2 / sxx);
        fit.intercept_stderr = std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    }
    return fit;
}

}  // namespace tokscale
