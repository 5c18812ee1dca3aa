#include <cmath>
#include <random>

#include "doctest.h"

#include "tokscale/errors.hpp"
#include "tokscale/random.hpp"
#include "tokscale/stationarity.hpp"
#include "tokscale/synth.hpp"

using namespace tokscale;

namespace {

std::vector<double> reference_series() {
    std::vector<double> y;
    for (int t = 0; t < 200; ++t)
        y.push_back(std::sin(0.37 * t) + 0.5 * std::cos(1.3 * t) + 0.002 * t + ((t * 7919) % 13) / 13.0);
    return y;
}

std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> y(n);
    for (auto& v : y) v = rng.normal();
    return y;
}

/// LM statistic written out directly from its definition.
double naive_lm(const std::vector<double>& y, std::size_t lag) {
    const double n = static_cast<double>(y.size());
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    std::vector<double> e;
    for (double v : y) e.push_back(v - mean);
    double num = 0.0, s = 0.0;
    for (double v : e) {
        s += v;
        num += s * s;
    }
    double s2 = 0.0;
    for (double v : e) s2 += v * v;
    for (std::size_t j = 1; j <= lag; ++j) {
        double g = 0.0;
        for (std::size_t t = j; t < e.size(); ++t) g += e[t] * e[t - j];
        s2 += 2.0 * (1.0 - static_cast<double>(j) / (lag + 1.0)) * g;
    }
    s2 /= n;
    return num / (n * n) / s2;
}

}  // namespace

TEST_CASE("LM statistic matches statsmodels at fixed lags") {
    const auto y = reference_series();
    struct Ref {
        KpssVariant v;
        std::size_t lag;
        double lm;
    };
    for (const auto& r : {Ref{KpssVariant::Level, 0, 0.30722544950932174}, Ref{KpssVariant::Level, 3, 0.12271276721198512},
                          Ref{KpssVariant::Level, 12, 0.30927928414025047}, Ref{KpssVariant::Trend, 0, 0.03262280245591265},
                          Ref{KpssVariant::Trend, 3, 0.01314431197420633},
                          Ref{KpssVariant::Trend, 12, 0.04048567810658372}}) {
        const auto res = kpss_test(y, r.v, KpssBandwidth::fixed(r.lag));
        INFO("variant=" << to_string(r.v) << " lag=" << r.lag);
        CHECK(res.lm_statistic == doctest::Approx(r.lm).epsilon(1e-10));
        CHECK(res.bandwidth == r.lag);
    }
}

TEST_CASE("LM statistic matches a direct evaluation") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto y = gaussian_noise(300, seed);
        for (std::size_t lag : {0u, 1u, 7u}) {
            const auto r = kpss_test(y, KpssVariant::Level, KpssBandwidth::fixed(lag));
            CHECK(r.lm_statistic == doctest::Approx(naive_lm(y, lag)).epsilon(1e-10));
        }
    }
}

TEST_CASE("work quantities satisfy their invariants") {
    const auto y = gaussian_noise(500, 3);
    KpssWork w;
    const auto r = kpss_test(y, KpssVariant::Level, KpssBandwidth::newey_west(), &w);
    double max_e = 0.0, sum = 0.0;
    for (double e : w.residuals) {
        max_e = std::max(max_e, std::abs(e));
        sum += e;
    }
    CHECK(std::abs(sum) <= 1e-9 * 500 * max_e);
    CHECK(std::abs(w.partial_sums.back()) <= 1e-9 * 500 * max_e);
    CHECK(w.bandwidth == r.bandwidth);
    CHECK(w.long_run_variance > 0.0);
    for (std::size_t l = 1; l < 30; ++l)
        for (std::size_t s = 1; s <= l; ++s) {
            CHECK(bartlett_weight(s, l) > 0.0);
            CHECK(bartlett_weight(s, l) <= 1.0);
        }
}

TEST_CASE("trend residuals are orthogonal to time") {
    auto y = gaussian_noise(200, 8);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] += 0.05 * static_cast<double>(t);
    const auto e = kpss_residuals(y, KpssVariant::Trend);
    double s = 0.0, st = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) {
        s += e[t];
        st += e[t] * static_cast<double>(t + 1);
    }
    CHECK(std::abs(s) < 1e-9);
    CHECK(std::abs(st) < 1e-6);
}

TEST_CASE("zero lag reduces to the residual variance") {
    const auto y = gaussian_noise(100, 2);
    const auto e = kpss_residuals(y, KpssVariant::Level);
    double v = 0.0;
    for (double x : e) v += x * x;
    CHECK(long_run_variance(e, 0) == doctest::Approx(v / 100.0).epsilon(1e-14));
}

TEST_CASE("LM is invariant to shifts and scaling") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto y = gaussian_noise(400, 100 + seed);
        const auto base = kpss_test(y, KpssVariant::Level);
        std::vector<double> shifted, scaled;
        for (double v : y) {
            shifted.push_back(v + 1234.5);
            scaled.push_back(-7.25 * v);
        }
        const auto a = kpss_test(shifted, KpssVariant::Level);
        const auto b = kpss_test(scaled, KpssVariant::Level);
        CHECK(a.bandwidth == base.bandwidth);
        CHECK(b.bandwidth == base.bandwidth);
        CHECK(a.lm_statistic == doctest::Approx(base.lm_statistic).epsilon(1e-10));
        CHECK(b.lm_statistic == doctest::Approx(base.lm_statistic).epsilon(1e-10));
    }
}

TEST_CASE("constant series are degenerate and stationary") {
    const std::vector<double> y(50, 3.0);
    const auto r = kpss_test(y);
    CHECK(r.degenerate);
    CHECK(r.stationary_at_5pct);
    CHECK(r.lm_statistic == 0.0);
    const std::vector<double> trend_line = [] {
        std::vector<double> v;
        for (int t = 0; t < 40; ++t) v.push_back(2.0 + 0.5 * t);
        return v;
    }();
    CHECK(kpss_test(trend_line, KpssVariant::Trend).degenerate);
    CHECK_FALSE(kpss_test(trend_line, KpssVariant::Level).degenerate);
}

TEST_CASE("short series are rejected") {
    const std::vector<double> y(9, 1.0);
    CHECK_THROWS_AS(kpss_test(y), InsufficientDataError);
}

TEST_CASE("p-value interpolation and clamping") {
    auto [p, clamped] = kpss_p_value(0.463, KpssVariant::Level);
    CHECK(p == doctest::Approx(0.05));
    CHECK_FALSE(clamped);
    std::tie(p, clamped) = kpss_p_value(0.405, KpssVariant::Level);
    CHECK(p == doctest::Approx(0.10 + (0.405 - 0.347) / (0.463 - 0.347) * (0.05 - 0.10)));
    std::tie(p, clamped) = kpss_p_value(0.1, KpssVariant::Level);
    CHECK(p == 0.10);
    CHECK(clamped);
    std::tie(p, clamped) = kpss_p_value(2.0, KpssVariant::Level);
    CHECK(p == 0.01);
    CHECK(clamped);
    std::tie(p, clamped) = kpss_p_value(0.176, KpssVariant::Trend);
    CHECK(p == doctest::Approx(0.025));
    std::tie(p, clamped) = kpss_p_value(0.2, KpssVariant::Trend);
    CHECK(p == doctest::Approx(0.025 + (0.2 - 0.176) / (0.216 - 0.176) * (0.01 - 0.025)));
}

TEST_CASE("stationary verdict follows the p-value") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto y = gaussian_noise(200, seed);
        if (seed % 2) {
            double acc = 0.0;
            for (auto& v : y) v = acc += v;
        }
        const auto r = kpss_test(y);
        CHECK(r.stationary_at_5pct == (r.p_value > 0.05));
        CHECK(r.p_value >= 0.01);
        CHECK(r.p_value <= 0.10);
    }
}

TEST_CASE("bandwidth rules") {
    CHECK(schwert_bandwidth(1000) == 7);
    CHECK(schwert_bandwidth(100) == 4);
    const auto y = gaussian_noise(1000, 1);
    const auto e = kpss_residuals(y, KpssVariant::Level);
    CHECK(newey_west_bandwidth(e) < 10);
    auto walk = y;
    double acc = 0.0;
    for (auto& v : walk) v = acc += v;
    const auto ew = kpss_residuals(walk, KpssVariant::Level);
    CHECK(newey_west_bandwidth(ew) > newey_west_bandwidth(e));
    CHECK(newey_west_bandwidth(ew) <= 999);
    const auto r = kpss_test(y, KpssVariant::Level, KpssBandwidth::schwert());
    CHECK(r.bandwidth == 7);
}

TEST_CASE("size on white noise and power against random walks") {
    int rejected_noise = 0, rejected_walk = 0;
    const int runs = 200;
    for (int seed = 0; seed < runs; ++seed) {
        const auto y = gaussian_noise(1000, 7000 + seed);
        rejected_noise += !kpss_test(y).stationary_at_5pct;
        const auto w = gen_random_walk(1000, 1.0, 9000 + seed);
        rejected_walk += !kpss_test(w).stationary_at_5pct;
    }
    CHECK(rejected_noise <= 0.08 * runs);
    CHECK(rejected_walk >= 0.95 * runs);
}

TEST_CASE("stationary fraction over Poisson and random-walk populations") {
    std::vector<double> rates;
    for (int i = 0; i < 200; ++i) rates.push_back(0.05 + 0.05 * i);
    const auto poisson = gen_poisson_accounts(rates, 720, 31);
    const auto tally = stationary_fraction(poisson);
    REQUIRE(tally.percentage().has_value());
    CHECK(*tally.percentage() >= 92.0);
    CHECK(tally.tested + tally.skipped == poisson.size());

    std::vector<HourlySeries> walks;
    for (AccountId i = 0; i < 100; ++i) walks.push_back(gen_count_random_walk(i, 720, 1.0, 30.0, 500 + i));
    const auto wt = stationary_fraction(walks);
    REQUIRE(wt.percentage().has_value());
    CHECK(*wt.percentage() <= 10.0);

    CHECK_FALSE(stationary_fraction({}).percentage().has_value());
}

TEST_CASE("activity floor and degenerate accounting") {
    HourlySeries quiet{1, Role::Sender, std::vector<std::uint32_t>(100, 0)};
    quiet.counts[3] = 1;
    HourlySeries constant{2, Role::Sender, std::vector<std::uint32_t>(100, 4)};
    const std::vector<HourlySeries> set{quiet, constant};
    const auto t = stationary_fraction(set);
    CHECK(t.skipped == 1);
    CHECK(t.tested == 1);
    CHECK(t.degenerate == 1);
    CHECK(t.stationary == 1);
    CHECK(*t.percentage() == 100.0);
}

TEST_CASE("counter merge equals a single pass") {
    std::vector<double> rates(60, 2.0);
    const auto series = gen_common_mode_accounts(rates, 0.5, 300, 4);
    StationarityCounter all, a, b;
    for (std::size_t i = 0; i < series.size(); ++i) {
        all.add(series[i]);
        (i < 25 ? a : b).add(series[i]);
    }
    b.merge(a);
    CHECK(b.tally().tested == all.tally().tested);
    CHECK(b.tally().stationary == all.tally().stationary);
    CHECK(b.tally().skipped == all.tally().skipped);
}

TEST_CASE("automatic bandwidth matches the plug-in formula") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto y = gaussian_noise(50 + 97 * seed, seed);
        if (seed % 3 == 0) {
            double acc = 0.0;
            for (auto& v : y) v = acc += v;
        }
        const auto e = kpss_residuals(y, KpssVariant::Level);
        const double t = static_cast<double>(e.size());
        const auto n_pre = static_cast<std::size_t>(std::floor(4.0 * std::pow(t / 100.0, 2.0 / 9.0)));
        auto acov = [&](std::size_t j) {
            double s = 0.0;
            for (std::size_t i = j; i < e.size(); ++i) s += e[i] * e[i - j];
            return s / t;
        };
        double s0 = acov(0), s1 = 0.0;
        for (std::size_t j = 1; j <= n_pre; ++j) {
            s0 += 2.0 * acov(j);
            s1 += static_cast<double>(j) * acov(j);
        }
        const auto expected = std::min<std::size_t>(
            static_cast<std::size_t>(std::floor(1.1447 * std::cbrt((s1 / s0) * (s1 / s0) * t))), e.size() - 1);
        CHECK(newey_west_bandwidth(e) == expected);
    }
}
