#include "tokscale/powerlaw_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tokscale/errors.hpp"
#include "tokscale/hurwitz_zeta.hpp"

namespace tokscale {

TailModel TailModel::make(double gamma, std::uint64_t x_min) {
    if (x_min < 1) throw std::invalid_argument("x_min must be >= 1");
    return {gamma, x_min, hurwitz_zeta(gamma, static_cast<double>(x_min))};
}

double TailModel::log_pmf(std::uint64_t x) const {
    return -gamma * std::log(static_cast<double>(x)) - std::log(zeta_norm);
}

double TailModel::survival(std::uint64_t x) const {
    if (x < x_min) return 1.0;
    return hurwitz_zeta(gamma, static_cast<double>(x) + 1.0) / zeta_norm;
}

double powerlaw_log_likelihood(double gamma, std::size_t n, double sum_log_x, std::uint64_t x_min) {
    return -static_cast<double>(n) * std::log(hurwitz_zeta(gamma, static_cast<double>(x_min))) -
           gamma * sum_log_x;
}

PowerLawMle fit_gamma_mle(std::size_t n, double sum_log_x, std::uint64_t x_min) {
    if (n < 2) throw InsufficientDataError("power-law MLE needs at least two tail values");
    if (x_min < 1) throw std::invalid_argument("x_min must be >= 1");
    if (sum_log_x <= static_cast<double>(n) * std::log(static_cast<double>(x_min)))
        throw DegenerateInputError("all tail values equal x_min; the likelihood is unbounded");

    auto ell = [&](double g) { return powerlaw_log_likelihood(g, n, sum_log_x, x_min); };

    // ell is strictly concave in gamma, so golden-section search converges to
    // the unique maximiser (or the upper bound when it lies beyond it).
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = kGammaLower, hi = kGammaUpper;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = ell(x1), f2 = ell(x2);
    while (hi - lo > 1e-8) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = ell(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = ell(x1);
        }
    }
    PowerLawMle out;
    out.gamma = 0.5 * (lo + hi);
    const auto z = hurwitz_zeta_derivatives(out.gamma, static_cast<double>(x_min));
    const double m1 = z.d1 / z.value;
    const double info = static_cast<double>(n) * (z.d2 / z.value - m1 * m1);
    out.sigma_gamma = info > 0.0 ? 1.0 / std::sqrt(info) : std::numeric_limits<double>::infinity();
    out.log_likelihood = -static_cast<double>(n) * std::log(z.value) - out.gamma * sum_log_x;
    return out;
}

namespace {

void check_tail(std::span<const std::uint64_t> tail, std::uint64_t x_min) {
    for (auto x : tail)
        if (x < x_min) throw std::invalid_argument("tail value below x_min");
}

// Sorted unique values with multiplicities.
struct Histogram {
    std::vector<std::uint64_t> value;
    std::vector<std::size_t> count;
};

Histogram histogram(std::span<const std::uint64_t> data) {
    std::vector<std::uint64_t> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    Histogram h;
    for (auto x : sorted) {
        if (h.value.empty() || h.value.back() != x) {
            h.value.push_back(x);
            h.count.push_back(0);
        }
        ++h.count.back();
    }
    return h;
}

// KS over histogram entries [first, end) against `model`, n = tail size.
double ks_over(const Histogram& h, std::size_t first, std::size_t n, const TailModel& model) {
    double d = 0.0;
    std::size_t cumulative = 0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = first; i < h.value.size(); ++i) {
        cumulative += h.count[i];
        const double empirical = static_cast<double>(cumulative) * inv_n;
        d = std::max(d, std::abs(empirical - model.cdf(h.value[i])));
    }
    return d;
}

}  // namespace

PowerLawMle fit_gamma_mle(std::span<const std::uint64_t> tail, std::uint64_t x_min) {
    check_tail(tail, x_min);
    double sum_log = 0.0;
    // Sorted summation keeps the result independent of input order.
    std::vector<std::uint64_t> sorted(tail.begin(), tail.end());
    std::sort(sorted.begin(), sorted.end());
    for (auto x : sorted) sum_log += std::log(static_cast<double>(x));
    if (sorted.size() >= 2 && sorted.front() == sorted.back())
        throw DegenerateInputError("all tail values are equal; the likelihood is unbounded");
    return fit_gamma_mle(sorted.size(), sum_log, x_min);
}

double ks_distance(std::span<const std::uint64_t> tail, const TailModel& model) {
    if (tail.empty()) throw InsufficientDataError("KS distance of an empty tail");
    check_tail(tail, model.x_min);
    return ks_over(histogram(tail), 0, tail.size(), model);
}

XminSelection select_xmin(std::span<const std::uint64_t> sample, std::size_t n_tail_min) {
    const Histogram h = histogram(sample);
    const std::size_t m = h.value.size();

    // Suffix tail sizes and log-sums.
    std::vector<std::size_t> tail_n(m + 1, 0);
    std::vector<double> tail_log(m + 1, 0.0);
    for (std::size_t i = m; i-- > 0;) {
        tail_n[i] = tail_n[i + 1] + h.count[i];
        tail_log[i] = tail_log[i + 1] + static_cast<double>(h.count[i]) * std::log(static_cast<double>(h.value[i]));
    }

    const std::size_t floor = std::max<std::size_t>(n_tail_min, 2);
    bool found = false;
    XminSelection best;
    for (std::size_t i = 0; i < m && tail_n[i] >= floor; ++i) {
        if (i + 1 == m || h.value[i] == 0) continue;  // single-valued tail or x = 0
        const std::uint64_t x_min = h.value[i];
        const PowerLawMle mle = fit_gamma_mle(tail_n[i], tail_log[i], x_min);
        const double d = ks_over(h, i, tail_n[i], TailModel::make(mle.gamma, x_min));
        if (!found || d < best.ks_distance) {
            best = {x_min, mle.gamma, mle.sigma_gamma, d, tail_n[i]};
            found = true;
        }
    }
    if (!found)
        throw InsufficientDataError("no x_min candidate leaves a tail of at least " +
                                    std::to_string(floor) + " values");
    return best;
}

double fit_discrete_exponential(std::span<const std::uint64_t> tail, std::uint64_t x_min) {
    if (tail.size() < 2) throw InsufficientDataError("exponential fit needs at least two tail values");
    check_tail(tail, x_min);
    std::vector<std::uint64_t> sorted(tail.begin(), tail.end());
    std::sort(sorted.begin(), sorted.end());
    long double excess = 0.0L;
    for (auto x : sorted) excess += static_cast<long double>(x - x_min);
    const double mean_excess = static_cast<double>(excess / static_cast<long double>(sorted.size()));
    if (mean_excess <= 0.0) throw DegenerateInputError("all tail mass sits at x_min");
    return std::log1p(1.0 / mean_excess);
}

double exponential_log_pmf(std::uint64_t x, double lambda, std::uint64_t x_min) {
    return std::log(-std::expm1(-lambda)) - lambda * static_cast<double>(x - x_min);
}

LlrResult vuong_test(std::span<const double> log_ratios) {
    LlrResult r;
    const std::size_t n = log_ratios.size();
    for (double v : log_ratios) r.llr += v;
    if (n < 2) {
        r.indistinguishable = true;
        return r;
    }
    const double mean = r.llr / static_cast<double>(n);
    double ss = 0.0;
    for (double v : log_ratios) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
        r.indistinguishable = true;
        return r;
    }
    r.z = r.llr / (sd * std::sqrt(static_cast<double>(n)));
    r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
    return r;
}

LlrResult llr_test(std::span<const std::uint64_t> tail, const TailModel& power, double lambda) {
    check_tail(tail, power.x_min);
    std::vector<std::uint64_t> sorted(tail.begin(), tail.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> ratios;
    ratios.reserve(sorted.size());
    const double log_norm = std::log(power.zeta_norm);
    const double log_exp_norm = std::log(-std::expm1(-lambda));
    for (auto x : sorted) {
        const double lp = -power.gamma * std::log(static_cast<double>(x)) - log_norm;
        const double le = log_exp_norm - lambda * static_cast<double>(x - power.x_min);
        ratios.push_back(lp - le);
    }
    return vuong_test(ratios);
}

std::string_view to_string(TailVerdict v) noexcept {
    switch (v) {
        case TailVerdict::PowerLawFavored: return "power-law favored";
        case TailVerdict::ExponentialFavored: return "exponential favored";
        case TailVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

TailVerdict decide_verdict(double llr, double p_value, double significance) {
    if (p_value >= significance || llr == 0.0) return TailVerdict::Inconclusive;
    return llr > 0.0 ? TailVerdict::PowerLawFavored : TailVerdict::ExponentialFavored;
}

TailFitReport analyze_tail(const DegreeSample& sample, const TailFitConfig& cfg) {
    if (sample.values.empty()) throw InsufficientDataError("empty degree sample");
    if (sample.values.size() < cfg.n_tail_min)
        throw InsufficientDataError("degree sample smaller than the tail-size floor");

    const XminSelection sel = select_xmin(sample.values, cfg.n_tail_min);
    std::vector<std::uint64_t> tail;
    tail.reserve(sel.n_tail);
    for (auto x : sample.values)
        if (x >= sel.x_min) tail.push_back(x);

    TailFitReport r;
    r.role = sample.role;
    r.gamma = sel.gamma;
    r.x_min = sel.x_min;
    r.sigma_gamma = sel.sigma_gamma;
    r.ks_distance = sel.ks_distance;
    r.n_tail = tail.size();
    r.n_sample = sample.values.size();
    r.lambda = fit_discrete_exponential(tail, sel.x_min);
    const LlrResult llr = llr_test(tail, TailModel::make(sel.gamma, sel.x_min), r.lambda);
    r.llr = llr.llr;
    r.p_value = llr.p_value;
    r.indistinguishable = llr.indistinguishable;
    r.verdict = decide_verdict(r.llr, r.p_value, cfg.significance);
    return r;
}

std::vector<DensityPoint> log_binned_density(std::span<const std::uint64_t> sample, int n_bins) {
    std::vector<DensityPoint> out;
    if (sample.empty() || n_bins < 1) return out;
    const Histogram h = histogram(sample);
    const double lo = static_cast<double>(std::max<std::uint64_t>(h.value.front(), 1));
    const double hi = static_cast<double>(h.value.back()) + 1.0;
    const double ratio = hi / lo;
    std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i) edges[static_cast<std::size_t>(i)] = lo * std::pow(ratio, static_cast<double>(i) / n_bins);
    edges.back() = hi;
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
    for (std::size_t i = 0; i < h.value.size(); ++i) {
        const double x = static_cast<double>(h.value[i]);
        if (x < lo) continue;
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - edges.begin()) - 1, counts.size() - 1);
        counts[idx] += h.count[i];
    }
    const double n = static_cast<double>(sample.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        // Integers covered by [edge_i, edge_{i+1}).
        const double width = std::ceil(edges[i + 1]) - std::ceil(edges[i]);
        if (width <= 0.0) continue;
        out.push_back({std::sqrt(edges[i] * edges[i + 1]), static_cast<double>(counts[i]) / (n * width)});
    }
    return out;
}

}  // namespace tokscale
