#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tokscale/aggregation.hpp"

namespace tokscale {

/// Discrete power law p(x) = x^-gamma / zeta(gamma, x_min) on x >= x_min.
struct TailModel {
    double gamma = 2.0;
    std::uint64_t x_min = 1;
    double zeta_norm = 0.0;

    static TailModel make(double gamma, std::uint64_t x_min);

    double log_pmf(std::uint64_t x) const;
    /// P(X > x)
    double survival(std::uint64_t x) const;
    /// P(X <= x)
    double cdf(std::uint64_t x) const { return 1.0 - survival(x); }
};

inline constexpr double kGammaLower = 1.0 + 1e-6;
inline constexpr double kGammaUpper = 20.0;

/// ell(gamma) = -n ln zeta(gamma, x_min) - gamma * sum_log_x
double powerlaw_log_likelihood(double gamma, std::size_t n, double sum_log_x, std::uint64_t x_min);

struct PowerLawMle {
    double gamma = 0.0;
    double sigma_gamma = 0.0;
    double log_likelihood = 0.0;
};

/// Golden-section maximisation of the log-likelihood over
/// (kGammaLower, kGammaUpper]; sigma from the Fisher information
/// n * Var_model(ln x). Throws InsufficientDataError for n < 2 and
/// DegenerateInputError when every value is equal.
PowerLawMle fit_gamma_mle(std::span<const std::uint64_t> tail, std::uint64_t x_min);

/// Same, from sufficient statistics (n, sum ln x).
PowerLawMle fit_gamma_mle(std::size_t n, double sum_log_x, std::uint64_t x_min);

/// max over observed values x of |S(x) - P(x)|.
double ks_distance(std::span<const std::uint64_t> tail, const TailModel& model);

struct XminSelection {
    std::uint64_t x_min = 1;
    double gamma = 0.0;
    double sigma_gamma = 0.0;
    double ks_distance = 0.0;
    std::size_t n_tail = 0;
};

/// Scans the unique sample values with tail size >= n_tail_min and keeps the
/// candidate of smallest KS distance (ties go to the smaller x_min).
XminSelection select_xmin(std::span<const std::uint64_t> sample, std::size_t n_tail_min);

/// MLE of P(x) = (1 - e^-lambda) e^{-lambda (x - x_min)}:
/// lambda = ln(1 + 1 / (mean - x_min)).
double fit_discrete_exponential(std::span<const std::uint64_t> tail, std::uint64_t x_min);

double exponential_log_pmf(std::uint64_t x, double lambda, std::uint64_t x_min);

struct LlrResult {
    double llr = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    /// Pointwise log-ratios have zero variance; p is pinned to 1.
    bool indistinguishable = false;
};

/// Vuong-normalised test on pointwise log-likelihood ratios.
LlrResult vuong_test(std::span<const double> log_ratios);

/// R = sum ln p_pl(x_i) - ln p_exp(x_i), with Vuong p-value.
LlrResult llr_test(std::span<const std::uint64_t> tail, const TailModel& power, double lambda);

enum class TailVerdict { PowerLawFavored, ExponentialFavored, Inconclusive };

std::string_view to_string(TailVerdict v) noexcept;

struct TailFitConfig {
    std::size_t n_tail_min = 50;
    double significance = 0.05;
};

struct TailFitReport {
    Role role = Role::Sender;
    double gamma = 0.0;
    std::uint64_t x_min = 1;
    double sigma_gamma = 0.0;
    double ks_distance = 0.0;
    double llr = 0.0;
    double p_value = 1.0;
    std::size_t n_tail = 0;
    std::size_t n_sample = 0;
    double lambda = 0.0;
    bool indistinguishable = false;
    TailVerdict verdict = TailVerdict::Inconclusive;
};

TailVerdict decide_verdict(double llr, double p_value, double significance);

/// select_xmin, then the exponential fit and LLR on the selected tail.
TailFitReport analyze_tail(const DegreeSample& sample, const TailFitConfig& cfg = {});

struct DensityPoint {
    double x = 0.0;        // geometric centre of the bin
    double density = 0.0;  // fraction of the sample per unit x
};

/// Log-binned empirical probability density for plotting.
std::vector<DensityPoint> log_binned_density(std::span<const std::uint64_t> sample, int n_bins = 20);

}  // namespace tokscale
