#pragma once

namespace tokscale {

/// zeta(s, q) and its first two derivatives with respect to s.
struct ZetaDerivatives {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Hurwitz zeta sum_{k>=0} (q + k)^(-s) for s > 1, q > 0.
/// Throws std::domain_error when s <= 1 or q <= 0.
double hurwitz_zeta(double s, double q);

ZetaDerivatives hurwitz_zeta_derivatives(double s, double q);

}  // namespace tokscale
