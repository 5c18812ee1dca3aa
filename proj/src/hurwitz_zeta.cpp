#include "tokscale/hurwitz_zeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace tokscale {

namespace {

// B_{2j} / (2j)! for j = 1..12.
constexpr std::array<double, 12> kBernoulliOverFactorial{
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
};

// Below this shift the series is summed directly; beyond it the
// Euler-Maclaurin remainder after 12 Bernoulli terms is under 1e-16 relative
// for s <= 20.
constexpr double kEulerMaclaurinStart = 25.0;

template <bool WithDerivatives>
ZetaDerivatives evaluate(double s, double q) {
    if (!(s > 1.0)) throw std::domain_error("Hurwitz zeta diverges for s <= 1");
    if (!(q > 0.0)) throw std::domain_error("Hurwitz zeta needs q > 0");

    ZetaDerivatives out;
    const double shift_floor = std::max(kEulerMaclaurinStart, s + 5.0);
    double a = q;
    while (a < shift_floor) {
        const double ln = std::log(a);
        const double t = std::exp(-s * ln);
        out.value += t;
        if constexpr (WithDerivatives) {
            out.d1 -= ln * t;
            out.d2 += ln * ln * t;
        }
        a += 1.0;
    }

    const double ln_a = std::log(a);
    const double u = s - 1.0;
    const double a_pow = std::exp(-s * ln_a);  // a^(-s)

    // Integral term a^(1-s)/(s-1) and half term a^(-s)/2.
    const double integral = a * a_pow / u;
    out.value += integral + 0.5 * a_pow;
    if constexpr (WithDerivatives) {
        out.d1 += -ln_a * integral - integral / u - 0.5 * ln_a * a_pow;
        out.d2 += ln_a * ln_a * integral + 2.0 * ln_a * integral / u + 2.0 * integral / (u * u) +
                  0.5 * ln_a * ln_a * a_pow;
    }

    // Correction terms B_{2j}/(2j)! * (s)_{2j-1} * a^(-s-2j+1), with the
    // rising factorial P = s(s+1)...(s+2j-2) and its s-derivatives.
    double rising = s;            // P
    double dlog_rising = 1.0 / s; // sum 1/(s+i)
    double d2_sum = 1.0 / (s * s);// sum 1/(s+i)^2
    double power = a_pow / a;     // a^(-s-1)
    const double inv_a2 = 1.0 / (a * a);
    for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
        const double c = kBernoulliOverFactorial[j];
        const double g = rising * power;
        out.value += c * g;
        if constexpr (WithDerivatives) {
            const double dp = rising * dlog_rising;
            const double d2p = rising * (dlog_rising * dlog_rising - d2_sum);
            out.d1 += c * power * (dp - ln_a * rising);
            out.d2 += c * power * (d2p - 2.0 * ln_a * dp + ln_a * ln_a * rising);
        }
        const double k1 = s + 2.0 * static_cast<double>(j) + 1.0;
        const double k2 = k1 + 1.0;
        rising *= k1 * k2;
        dlog_rising += 1.0 / k1 + 1.0 / k2;
        d2_sum += 1.0 / (k1 * k1) + 1.0 / (k2 * k2);
        power *= inv_a2;
    }
    return out;
}

}  // namespace

double hurwitz_zeta(double s, double q) {
    return evaluate<false>(s, q).value;
}

ZetaDerivatives hurwitz_zeta_derivatives(double s, double q) {
    return evaluate<true>(s, q);
}

}  // namespace tokscale
