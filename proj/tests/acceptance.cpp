// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gsl/gsl_sf_zeta.h>

#include "test_support.hpp"

#include "tokscale/hurwitz_zeta.hpp"
#include "tokscale/ingest.hpp"
#include "tokscale/powerlaw_fit.hpp"
#include "tokscale/random.hpp"
#include "tokscale/report.hpp"
#include "tokscale/scaling_fit.hpp"
#include "tokscale/stationarity.hpp"
#include "tokscale/synth.hpp"
#include "tokscale/taylor.hpp"

using namespace tokscale;
using test_support::read_file;
using test_support::TempDir;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Accumulates sub-check outcomes and a one-line detail string.
struct Criterion {
    bool ok = true;
    std::ostringstream detail;

    void check(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---- 1: census reproduces the generator's ground truth ----

bool census_matches_sidecar(const fs::path& ledger, const nlohmann::json& sidecar, double* elapsed) {
    IngestConfig cfg;
    cfg.periods.k = static_cast<int>(sidecar["boundaries"].size()) - 1;
    cfg.periods.boundaries = sidecar["boundaries"].get<std::vector<Timestamp>>();
    const std::vector<fs::path> inputs{ledger};
    const auto start = Clock::now();
    const auto summary = ingest_census(inputs, cfg);
    if (elapsed) *elapsed = seconds_since(start);
    const auto j = summary_to_json(summary);
    return j["counts"] == sidecar["census"] && j["total"] == sidecar["total"] && j["malformed_rows"] == 0 &&
           j["out_of_span_rows"] == 0;
}

void criterion_census(Criterion& c) {
    TempDir dir;
    // Same quotas as scenarios/table1_scaled.json: three calendar quarters from Jul 2017.
    ScenarioSpec table1;
    table1.start_ts = 1498867200;
    table1.period_seconds = 7862400;
    table1.periods = 3;
    const std::array<std::vector<std::uint64_t>, 4> quotas{
        {{403, 973, 1669}, {63, 94, 130}, {167, 386, 483}, {15, 45, 59}}};
    for (int i = 0; i < 4; ++i) {
        CategoryScenario s;
        s.rows = quotas[i];
        s.senders = 50;
        s.receivers = 50;
        table1.categories[i] = s;
    }
    int matched = 0;
    const int seeds = 5;
    for (int seed = 0; seed < seeds; ++seed) {
        fabricate_ledger(table1, 100 + seed, dir / "t1.csv", dir / "t1.json");
        matched += census_matches_sidecar(dir / "t1.csv", nlohmann::json::parse(read_file(dir / "t1.json")), nullptr);
    }
    c.check(matched == seeds, "table1_scaled census");

    // Mixed structured and flat population.
    ScenarioSpec mixed;
    mixed.period_seconds = 86400 * 7;
    mixed.periods = 4;
    CategoryScenario pl;
    pl.gamma = 2.1;
    pl.senders = 3000;
    pl.receivers = 2000;
    pl.trades_per_partner = 2;
    mixed.categories[0] = pl;
    CategoryScenario flat;
    flat.rows = {10, 0, 500, 7};
    flat.senders = 5;
    flat.receivers = 8;
    mixed.categories[2] = flat;
    fabricate_ledger(mixed, 9, dir / "mx.csv", dir / "mx.json");
    c.check(census_matches_sidecar(dir / "mx.csv", nlohmann::json::parse(read_file(dir / "mx.json")), nullptr),
            "structured scenario census");

    // 10^6 rows in the same category mix.
    ScenarioSpec big = table1;
    const double scale = 1e6 / 4487.0;
    std::uint64_t total = 0;
    for (int i = 0; i < 4; ++i) {
        auto& s = *big.categories[i];
        s.senders = 20000;
        s.receivers = 20000;
        for (auto& r : s.rows) {
            r = static_cast<std::uint64_t>(std::llround(static_cast<double>(r) * scale));
            total += r;
        }
    }
    big.categories[0]->rows[2] += 1'000'000 - total;
    fabricate_ledger(big, 1, dir / "big.csv", dir / "big.json");
    const auto big_sidecar = nlohmann::json::parse(read_file(dir / "big.json"));
    double elapsed = 0.0;
    c.check(census_matches_sidecar(dir / "big.csv", big_sidecar, &elapsed), "10^6-row census");
    c.check(elapsed < 10.0, "10^6-row census runtime");
    c.detail << "table1_scaled " << matched << "/" << seeds << " exact; " << big_sidecar["total"]
             << " rows censused exactly in " << elapsed << " s";
}

// ---- 2: scaling exponent recovery ----

void criterion_scaling(Criterion& c) {
    double worst = 0.0;
    for (double alpha : {0.67, 1.0, 2.0}) {
        // One partner value per logarithmic bin: endpoints and interior centres.
        const int n_bins = 20;
        const double lo = 1.0, hi = 1e4;
        std::vector<double> partners{lo};
        for (int i = 1; i < n_bins - 1; ++i) partners.push_back(lo * std::pow(hi / lo, (i + 0.5) / n_bins));
        partners.push_back(hi);
        std::vector<ScatterPoint> pts;
        for (double n : partners)
            for (int copy = 0; copy < 5; ++copy) pts.push_back({n, std::pow(n, alpha)});
        const auto fit = fit_alpha(log_bin(pts, n_bins));
        worst = std::max(worst, std::abs(fit.alpha - alpha));
    }
    c.check(worst <= 1e-9, "exact recovery");

    Rng rng(2024);
    std::vector<ScatterPoint> pts;
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n_profiles = 100000;
    for (int i = 0; i < n_profiles; ++i) {
        const double n = std::round(std::pow(10.0, 4.0 * rng.uniform()));
        const double v = std::pow(n, 0.8) * std::exp(0.1 * rng.normal());
        pts.push_back({n, v});
        const long double x = std::log10(n), y = std::log10(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const long double m = n_profiles;
    const double oracle = static_cast<double>((m * sxy - sx * sy) / (m * sxx - sx * sx));
    const double binned = fit_alpha(log_bin(pts, 20)).alpha;
    c.check(std::abs(binned - oracle) <= 0.02, "binned vs raw oracle");
    c.check(std::abs(binned - 0.8) <= 0.02, "noisy recovery");
    c.detail << "exact max |alpha - alpha0| = " << worst << "; noisy alpha = " << binned
             << ", raw-scatter oracle = " << oracle;
}

// ---- 3: power-law MLE consistency ----

double grid_mle(const std::vector<std::uint64_t>& tail, std::uint64_t x_min, double lo, double hi, double step) {
    double sum_log = 0.0;
    for (auto x : tail) sum_log += std::log(static_cast<double>(x));
    const double n = static_cast<double>(tail.size());
    double best = lo, best_ll = -INFINITY;
    const int steps = static_cast<int>(std::round((hi - lo) / step));
    for (int i = 0; i <= steps; ++i) {
        const double g = lo + i * step;
        const double ll = -n * std::log(gsl_sf_hzeta(g, static_cast<double>(x_min))) - g * sum_log;
        if (ll > best_ll) {
            best_ll = ll;
            best = g;
        }
    }
    return best;
}

void criterion_mle(Criterion& c) {
    struct Case {
        double gamma;
        std::uint64_t x_min;
    };
    double worst_grid = 0.0, slowest = 0.0;
    for (const auto& tc : {Case{2.32, 5}, Case{1.68, 24}, Case{2.5, 1}}) {
        std::vector<double> estimates;
        for (int seed = 0; seed < 20; ++seed) {
            const auto sample = sample_discrete_powerlaw(tc.gamma, tc.x_min, 100000, 7000 + seed);
            const auto start = Clock::now();
            const auto fit = fit_gamma_mle(sample, tc.x_min);
            slowest = std::max(slowest, seconds_since(start));
            estimates.push_back(fit.gamma);
            if (seed < 3) {
                const double coarse = grid_mle(sample, tc.x_min, 1.01, 6.0, 0.01);
                const double fine = grid_mle(sample, tc.x_min, coarse - 0.02, coarse + 0.02, 1e-4);
                worst_grid = std::max(worst_grid, std::abs(fine - fit.gamma));
            }
        }
        const double med = median(estimates);
        c.check(std::abs(med - tc.gamma) <= 0.03, "median gamma for " + std::to_string(tc.gamma));
        c.detail << "(" << tc.gamma << "," << tc.x_min << ") median " << med << "; ";
    }
    // The complete tail pipeline, including the x_min scan, on one sample.
    DegreeSample s{Role::Sender, sample_discrete_powerlaw(2.32, 5, 100000, 1)};
    const auto start = Clock::now();
    analyze_tail(s);
    const double pipeline = seconds_since(start);
    c.check(worst_grid <= 2e-4, "grid oracle agreement");
    c.check(slowest < 5.0 && pipeline < 5.0, "runtime");
    c.detail << "max |grid - mle| = " << worst_grid << "; slowest MLE " << slowest << " s, full tail analysis "
             << pipeline << " s";
}

// ---- 4: KS / LLR discrimination ----

void criterion_discrimination(Criterion& c) {
    const int runs = 100;
    int pl_ok = 0, exp_ok = 0, scan_ok = 0;
    for (int seed = 0; seed < runs; ++seed) {
        const std::uint64_t x_min = 5;
        const auto pl = sample_discrete_powerlaw(2.32, x_min, 10000, 40000 + seed);
        const auto model = TailModel::make(fit_gamma_mle(pl, x_min).gamma, x_min);
        const auto r = llr_test(pl, model, fit_discrete_exponential(pl, x_min));
        pl_ok += ks_distance(pl, model) < 0.05 && r.llr > 0.0 && r.p_value < 0.05;

        const auto report = analyze_tail(DegreeSample{Role::Sender, pl});
        scan_ok += report.ks_distance < 0.05 && report.llr > 0.0 && report.p_value < 0.05;

        const auto ex = sample_discrete_exponential(0.5, 1, 10000, 50000 + seed);
        const auto ex_model = TailModel::make(fit_gamma_mle(ex, 1).gamma, 1);
        const auto re = llr_test(ex, ex_model, fit_discrete_exponential(ex, 1));
        exp_ok += re.llr < 0.0 && re.p_value < 0.05;
    }
    c.check(pl_ok >= 95, "power-law runs");
    c.check(scan_ok >= 95, "power-law runs with x_min scan");
    c.check(exp_ok >= 95, "exponential runs");
    c.detail << "power law (D<0.05, R>0, p<0.05): " << pl_ok << "/" << runs << " at generator x_min, " << scan_ok
             << "/" << runs << " with x_min scan; exponential (R<0, p<0.05): " << exp_ok << "/" << runs;
}

// ---- 5: Hurwitz zeta ----

void criterion_zeta(Criterion& c) {
    const double basel = std::numbers::pi * std::numbers::pi / 6.0;
    const double basel_err = std::abs(hurwitz_zeta(2.0, 1.0) - basel) / basel;
    c.check(basel_err <= 1e-10, "zeta(2,1)");
    Rng rng(55);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double s = 1.05 + 5.0 * rng.uniform();
        const double q = 0.05 + 100.0 * rng.uniform();
        const double lhs = hurwitz_zeta(s, q + 1.0);
        const double rhs = hurwitz_zeta(s, q) - std::pow(q, -s);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
    }
    c.check(worst <= 1e-10, "shift identity");
    c.detail << "zeta(2,1) rel. error " << basel_err << "; shift identity max rel. error " << worst
             << " over 50 pairs";
}

// ---- 6: KPSS size and power ----

void criterion_kpss(Criterion& c) {
    const auto start = Clock::now();
    const int seeds = 500;
    const std::size_t length = 1000;
    int size_rejections = 0, power_rejections = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng(Rng::derive(600, seed));
        std::vector<double> noise(length);
        for (auto& v : noise) v = rng.normal();
        size_rejections += !kpss_test(noise).stationary_at_5pct;
        power_rejections += !kpss_test(gen_random_walk(length, 1.0, 700 + seed)).stationary_at_5pct;
    }
    const double size = 100.0 * size_rejections / seeds;
    const double power = 100.0 * power_rejections / seeds;
    c.check(size >= 2.0 && size <= 8.0, "size");
    c.check(power >= 95.0, "power");

    Rng rates_rng(61);
    std::vector<double> rates(2000);
    for (auto& r : rates) r = std::exp(std::log(0.02) + (std::log(20.0) - std::log(0.02)) * rates_rng.uniform());
    const auto accounts = gen_poisson_accounts(rates, 2160, 62);
    const auto tally = stationary_fraction(accounts);
    const double pct = tally.percentage().value_or(0.0);
    c.check(pct >= 92.0, "Poisson stationary fraction");
    const double elapsed = seconds_since(start);
    c.check(elapsed < 60.0, "runtime");
    c.detail << "i.i.d. rejection " << size << "%, random-walk rejection " << power << "%, Poisson stationary "
             << pct << "% of " << tally.tested << " tested; " << elapsed << " s";
}

// ---- 7: Taylor exponent ----

TaylorFit fit_population(const std::vector<HourlySeries>& series) {
    std::vector<TaylorPoint> pts;
    for (const auto& s : series) pts.push_back(mean_variance(s));
    return fit_taylor(pts);
}

std::vector<double> log_uniform_rates(std::size_t n, double lo, double hi, Seed seed) {
    Rng rng(seed);
    std::vector<double> r(n);
    for (auto& v : r) v = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
    return r;
}

void criterion_taylor(Criterion& c) {
    const double poisson_b = fit_population(gen_poisson_accounts(log_uniform_rates(500, 0.1, 50.0, 1), 2160, 2)).b;
    c.check(poisson_b >= 0.95 && poisson_b <= 1.05, "Poisson population");
    const double common_b =
        fit_population(gen_common_mode_accounts(log_uniform_rates(500, 5.0, 500.0, 3), 0.25, 2160, 4)).b;
    c.check(common_b >= 1.8 && common_b <= 2.1, "common-mode population");

    double worst = 0.0;
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.5, 1.2}, {2.0, 2.5}, {1.0, 1.0}}) {
        std::vector<TaylorPoint> pts;
        for (AccountId i = 0; i < 50; ++i) {
            const double mu = std::pow(10.0, -1.0 + 0.07 * static_cast<double>(i));
            pts.push_back({i, mu, a * std::pow(mu, b)});
        }
        const auto f = fit_taylor(pts);
        worst = std::max({worst, std::abs(f.b - b), std::abs(f.a - a)});
    }
    c.check(worst <= 1e-9, "exact recovery");
    c.detail << "Poisson b = " << poisson_b << "; common-mode (c=0.25) b = " << common_b
             << "; exact (a, b) max error " << worst;
}

// ---- 8: end-to-end determinism ----

void criterion_determinism(Criterion& c) {
    TempDir dir;
    ScenarioSpec spec;
    spec.period_seconds = 86400 * 20;
    spec.periods = 2;
    CategoryScenario s;
    s.gamma = 2.3;
    s.senders = 5000;
    s.receivers = 3000;
    spec.categories[0] = s;
    CategoryScenario flat;
    flat.rows = {400, 900};
    flat.senders = 30;
    flat.receivers = 20;
    spec.categories[1] = flat;
    spec.categories[3] = flat;
    fabricate_ledger(spec, 77, dir / "ledger.csv", dir / "ledger.sidecar.json");

    RunConfig cfg;
    cfg.inputs = {dir / "ledger.csv"};
    cfg.ingest.periods.k = 2;
    cfg.seed = 77;
    write_output(run_analysis(cfg), dir / "a");
    write_output(run_analysis(cfg), dir / "b");
    std::size_t files = 0, identical = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        ++files;
        const auto other = dir / "b" / entry.path().filename();
        identical += fs::exists(other) && read_file(entry.path()) == read_file(other);
    }
    std::size_t files_b = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir / "b")) ++files_b;
    c.check(files > 0 && identical == files && files_b == files, "byte-identical outputs");
    c.detail << identical << "/" << files << " output files byte-identical across two runs";
}

}  // namespace

int main() {
    struct Entry {
        int number;
        const char* title;
        std::function<void(Criterion&)> run;
    };
    const std::vector<Entry> entries{
        {1, "classification census", criterion_census},
        {2, "scaling exponent recovery", criterion_scaling},
        {3, "power-law MLE consistency", criterion_mle},
        {4, "KS/LLR discrimination", criterion_discrimination},
        {5, "Hurwitz zeta accuracy", criterion_zeta},
        {6, "KPSS size and power", criterion_kpss},
        {7, "Taylor exponent oracles", criterion_taylor},
        {8, "end-to-end determinism", criterion_determinism},
    };
    int failures = 0;
    for (const auto& e : entries) {
        Criterion c;
        const auto start = Clock::now();
        try {
            e.run(c);
        } catch (const std::exception& ex) {
            c.ok = false;
            c.detail << " [exception: " << ex.what() << "]";
        }
        failures += !c.ok;
        std::printf("%s #%d %s: %s (%.1f s)\n", c.ok ? "PASS" : "FAIL", e.number, e.title, c.detail.str().c_str(),
                    seconds_since(start));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
