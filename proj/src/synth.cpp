#include "tokscale/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "tokscale/errors.hpp"
#include "tokscale/hurwitz_zeta.hpp"

namespace tokscale {

namespace {

constexpr std::size_t kSamplerTableMax = 1 << 14;

}  // namespace

PowerLawSampler::PowerLawSampler(double gamma, std::uint64_t x_min) : gamma_(gamma), x_min_(x_min) {
    if (!(gamma > 1.0)) throw std::invalid_argument("power-law sampler needs gamma > 1");
    if (x_min < 1) throw std::invalid_argument("power-law sampler needs x_min >= 1");
    zeta_norm_ = hurwitz_zeta(gamma, static_cast<double>(x_min));
    for (std::size_t i = 0; i < kSamplerTableMax; ++i) {
        table_.push_back(survival(x_min + i));
        if (table_.back() < 1e-9) break;
    }
}

double PowerLawSampler::survival(std::uint64_t x) const {
    return hurwitz_zeta(gamma_, static_cast<double>(x) + 1.0) / zeta_norm_;
}

std::uint64_t PowerLawSampler::quantile(double u) const {
    // CDF(x) >= u  <=>  P(X > x) <= 1 - u
    const double w = 1.0 - u;
    auto it = std::partition_point(table_.begin(), table_.end(), [w](double s) { return s > w; });
    if (it != table_.end()) return x_min_ + static_cast<std::uint64_t>(it - table_.begin());

    std::uint64_t lo = x_min_ + table_.size() - 1;  // survival(lo) > w
    std::uint64_t hi = lo;
    do {
        lo = hi;
        hi = hi > (UINT64_MAX >> 2) ? UINT64_MAX >> 1 : hi * 2;
    } while (survival(hi) > w && hi < (UINT64_MAX >> 1));
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (survival(mid) > w ? lo : hi) = mid;
    }
    return hi;
}

std::vector<std::uint64_t> sample_discrete_powerlaw(double gamma, std::uint64_t x_min, std::size_t n, Seed seed) {
    const PowerLawSampler sampler(gamma, x_min);
    Rng rng(seed);
    std::vector<std::uint64_t> out(n);
    for (auto& x : out) x = sampler(rng);
    return out;
}

std::vector<std::uint64_t> sample_discrete_exponential(double lambda, std::uint64_t x_min, std::size_t n,
                                                       Seed seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exponential sampler needs lambda > 0");
    Rng rng(seed);
    std::vector<std::uint64_t> out(n);
    for (auto& x : out) x = x_min + static_cast<std::uint64_t>(std::floor(-std::log(rng.uniform_open()) / lambda));
    return out;
}

std::vector<HourlySeries> gen_poisson_accounts(std::span<const double> rates, std::size_t hours, Seed seed) {
    return gen_common_mode_accounts(rates, 0.0, hours, seed);
}

std::vector<HourlySeries> gen_common_mode_accounts(std::span<const double> rates, double common_variance,
                                                   std::size_t hours, Seed seed) {
    if (common_variance < 0.0) throw std::invalid_argument("common-factor variance must be >= 0");
    if (hours < 2) throw std::invalid_argument("need at least two hours");
    for (double r : rates)
        if (!(r > 0.0)) throw std::invalid_argument("account rates must be positive");

    std::vector<double> factor(hours, 1.0);
    if (common_variance > 0.0) {
        Rng common(Rng::derive(seed, UINT64_MAX));
        for (auto& f : factor) f = common.gamma(1.0 / common_variance, common_variance);
    }
    std::vector<HourlySeries> out;
    out.reserve(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        Rng rng(Rng::derive(seed, i));
        HourlySeries s{static_cast<AccountId>(i), Role::Sender, std::vector<std::uint32_t>(hours)};
        for (std::size_t h = 0; h < hours; ++h) s.counts[h] = static_cast<std::uint32_t>(rng.poisson(rates[i] * factor[h]));
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<double> gen_random_walk(std::size_t length, double step_sd, Seed seed) {
    if (!(step_sd >= 0.0)) throw std::invalid_argument("step_sd must be >= 0");
    Rng rng(seed);
    std::vector<double> out(length);
    double x = 0.0;
    for (auto& v : out) {
        x += step_sd * rng.normal();
        v = x;
    }
    return out;
}

HourlySeries gen_count_random_walk(AccountId account, std::size_t length, double step_sd, double start, Seed seed) {
    const auto walk = gen_random_walk(length, step_sd, seed);
    HourlySeries s{account, Role::Sender, std::vector<std::uint32_t>(length)};
    for (std::size_t i = 0; i < length; ++i)
        s.counts[i] = static_cast<std::uint32_t>(std::max(0.0, std::round(start + walk[i])));
    return s;
}

// ---------------------------------------------------------------------------
// Scenario spec

namespace {

std::string field(Category c, const std::string& name) {
    return "categories." + std::string(to_string(c)) + "." + name;
}

}  // namespace

void ScenarioSpec::validate() const {
    if (periods < 1) throw ConfigError("periods: must be >= 1");
    if (period_seconds < 3600) throw ConfigError("period_seconds: must be >= 3600");
    if (start_ts < 0) throw ConfigError("start_ts: must be >= 0");
    std::uint64_t planned = 0;
    for (Category c : kAllCategories) {
        const auto& cat = categories[static_cast<std::size_t>(c)];
        if (!cat) continue;
        if (cat->structured()) {
            if (!(cat->gamma > 1.0)) throw ConfigError(field(c, "gamma") + ": must be > 1");
            if (cat->x_min < 1) throw ConfigError(field(c, "x_min") + ": must be >= 1");
            if (cat->receivers < cat->x_min)
                throw ConfigError(field(c, "receivers") + ": must be >= x_min");
            if (cat->trades_per_partner < 1) throw ConfigError(field(c, "trades_per_partner") + ": must be >= 1");
            planned += cat->senders;
        } else {
            if (cat->rows.size() != static_cast<std::size_t>(periods))
                throw ConfigError(field(c, "rows") + ": need one quota per period");
            if (cat->senders < 1) throw ConfigError(field(c, "senders") + ": must be >= 1");
            if (cat->receivers < 1) throw ConfigError(field(c, "receivers") + ": must be >= 1");
            for (auto q : cat->rows) planned += q;
        }
    }
    if (planned == 0) throw ConfigError("categories: the scenario generates no rows (all quotas are zero)");
}

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& j) {
    ScenarioSpec spec;
    auto get_int = [&](const nlohmann::json& obj, const char* key, std::int64_t def, const std::string& path) {
        if (!obj.contains(key)) return def;
        const auto& v = obj.at(key);
        if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
        return v.get<std::int64_t>();
    };
    auto get_nonneg = [&](const nlohmann::json& obj, const char* key, std::int64_t def, const std::string& path) {
        const auto v = get_int(obj, key, def, path);
        if (v < 0) throw ConfigError(path + ": must be >= 0");
        return static_cast<std::uint64_t>(v);
    };
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
    spec.start_ts = get_int(j, "start_ts", spec.start_ts, "start_ts");
    spec.period_seconds = get_int(j, "period_seconds", spec.period_seconds, "period_seconds");
    spec.periods = static_cast<int>(get_int(j, "periods", spec.periods, "periods"));
    if (j.contains("seed")) spec.seed = get_nonneg(j, "seed", 0, "seed");
    if (!j.contains("categories") || !j.at("categories").is_object())
        throw ConfigError("categories: expected an object keyed by category name");
    for (const auto& [name, body] : j.at("categories").items()) {
        const auto c = parse_category(name);
        if (!c) throw ConfigError("categories." + name + ": unknown category");
        const std::string base = "categories." + name;
        if (!body.is_object()) throw ConfigError(base + ": expected an object");
        CategoryScenario cat;
        if (body.contains("gamma")) {
            if (!body.at("gamma").is_number()) throw ConfigError(base + ".gamma: expected a number");
            cat.gamma = body.at("gamma").get<double>();
            if (!(cat.gamma > 1.0)) throw ConfigError(base + ".gamma: must be > 1");
            cat.x_min = get_nonneg(body, "x_min", 1, base + ".x_min");
            cat.senders = get_nonneg(body, "senders", 0, base + ".senders");
            cat.receivers = get_nonneg(body, "receivers", 10000, base + ".receivers");
            cat.trades_per_partner = get_nonneg(body, "trades_per_partner", 1, base + ".trades_per_partner");
        } else {
            if (!body.contains("rows")) throw ConfigError(base + ": needs either 'rows' or 'gamma'");
            const auto& rows = body.at("rows");
            if (rows.is_number_integer()) {
                const auto q = get_nonneg(body, "rows", 0, base + ".rows");
                cat.rows.assign(static_cast<std::size_t>(std::max(spec.periods, 1)), q);
            } else if (rows.is_array()) {
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const std::string path = base + ".rows[" + std::to_string(i) + "]";
                    if (!rows[i].is_number_integer()) throw ConfigError(path + ": expected an integer");
                    if (rows[i].get<std::int64_t>() < 0) throw ConfigError(path + ": must be >= 0");
                    cat.rows.push_back(rows[i].get<std::uint64_t>());
                }
            } else {
                throw ConfigError(base + ".rows: expected an integer or an array of integers");
            }
            cat.senders = get_nonneg(body, "senders", 50, base + ".senders");
            cat.receivers = get_nonneg(body, "receivers", 50, base + ".receivers");
        }
        spec.categories[static_cast<std::size_t>(*c)] = cat;
    }
    spec.validate();
    return spec;
}

nlohmann::ordered_json ScenarioSpec::to_json() const {
    nlohmann::ordered_json j;
    j["start_ts"] = start_ts;
    j["period_seconds"] = period_seconds;
    j["periods"] = periods;
    if (seed) j["seed"] = *seed;
    nlohmann::ordered_json cats = nlohmann::ordered_json::object();
    for (Category c : kAllCategories) {
        const auto& cat = categories[static_cast<std::size_t>(c)];
        if (!cat) continue;
        nlohmann::ordered_json b;
        if (cat->structured()) {
            b["senders"] = cat->senders;
            b["receivers"] = cat->receivers;
            b["gamma"] = cat->gamma;
            b["x_min"] = cat->x_min;
            b["trades_per_partner"] = cat->trades_per_partner;
        } else {
            b["rows"] = cat->rows;
            b["senders"] = cat->senders;
            b["receivers"] = cat->receivers;
        }
        cats[std::string(to_string(c))] = b;
    }
    j["categories"] = cats;
    return j;
}

std::vector<Timestamp> ScenarioSpec::boundaries() const {
    std::vector<Timestamp> b;
    for (int i = 0; i <= periods; ++i) b.push_back(start_ts + period_seconds * i);
    return b;
}

// ---------------------------------------------------------------------------
// Ledger fabrication

namespace {

std::string account_name(Category c, Role r, std::size_t index) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "0x%02x%02x%036llx", 0xa0 + static_cast<unsigned>(c),
                  r == Role::Sender ? 0x5e : 0x7e, static_cast<unsigned long long>(index));
    return buf;
}

// Ground truth tracked independently of the aggregation module.
struct SliceTruth {
    std::map<std::string, std::map<std::string, std::uint64_t>> pairs;  // sender -> receiver -> trades
    std::map<std::string, std::uint64_t> received;
};

// Floyd's algorithm: k distinct values from [0, n).
std::vector<std::size_t> distinct_sample(Rng& rng, std::size_t n, std::size_t k) {
    std::unordered_set<std::size_t> chosen;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
        const std::size_t pick = chosen.insert(t).second ? t : j;
        if (pick == j) chosen.insert(j);
        out.push_back(pick);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

FabricatedLedger fabricate(const ScenarioSpec& spec, Seed seed) {
    spec.validate();
    FabricatedLedger out;
    const auto bounds = spec.boundaries();
    std::array<std::vector<std::uint64_t>, 4> census;
    nlohmann::ordered_json slices = nlohmann::ordered_json::array();

    for (Category c : kAllCategories) {
        const auto ci = static_cast<std::size_t>(c);
        census[ci].assign(static_cast<std::size_t>(spec.periods), 0);
        const auto& cat = spec.categories[ci];
        if (!cat) continue;
        const bool s_contract = c == Category::SC_EOA || c == Category::SC_SC;
        const bool r_contract = c == Category::EOA_SC || c == Category::SC_SC;

        for (int p = 1; p <= spec.periods; ++p) {
            Rng rng(Rng::derive(seed, ci * 4096 + static_cast<std::uint64_t>(p)));
            const Timestamp lo = bounds[static_cast<std::size_t>(p - 1)];
            const auto span = static_cast<std::uint64_t>(spec.period_seconds);
            SliceTruth truth;
            auto emit = [&](std::size_t s, std::size_t r) {
                TransferRecord rec{account_name(c, Role::Sender, s), account_name(c, Role::Receiver, r), s_contract,
                                   r_contract, lo + static_cast<Timestamp>(rng.below(span))};
                ++truth.pairs[rec.sender_id][rec.receiver_id];
                ++truth.received[rec.receiver_id];
                ++census[ci][static_cast<std::size_t>(p - 1)];
                out.rows.push_back(std::move(rec));
            };

            if (cat->structured()) {
                const PowerLawSampler sampler(cat->gamma, cat->x_min);
                for (std::size_t s = 0; s < cat->senders; ++s) {
                    std::uint64_t partners;
                    do {
                        partners = sampler(rng);
                    } while (partners > cat->receivers);
                    for (auto r : distinct_sample(rng, cat->receivers, static_cast<std::size_t>(partners)))
                        for (std::uint64_t t = 0; t < cat->trades_per_partner; ++t) emit(s, r);
                }
            } else {
                for (std::uint64_t i = 0; i < cat->rows[static_cast<std::size_t>(p - 1)]; ++i) {
                    const auto s = static_cast<std::size_t>(rng.below(cat->senders));
                    const auto r = static_cast<std::size_t>(rng.below(cat->receivers));
                    emit(s, r);
                }
            }

            nlohmann::ordered_json slice;
            slice["category"] = std::string(to_string(c));
            slice["period"] = p;
            nlohmann::ordered_json profiles = nlohmann::ordered_json::array();
            nlohmann::ordered_json sent = nlohmann::ordered_json::array();
            for (const auto& [sender, partners] : truth.pairs) {
                std::uint64_t v = 0;
                for (const auto& [r, n] : partners) v += n;
                profiles.push_back({sender, v, partners.size()});
                sent.push_back({sender, v});
            }
            nlohmann::ordered_json received = nlohmann::ordered_json::array();
            for (const auto& [r, n] : truth.received) received.push_back({r, n});
            slice["profiles"] = std::move(profiles);
            slice["sender_totals"] = std::move(sent);
            slice["receiver_totals"] = std::move(received);
            slices.push_back(std::move(slice));
        }
    }

    Rng shuffler(Rng::derive(seed, 0xFFFF0000ULL));
    for (std::size_t i = out.rows.size(); i > 1; --i)
        std::swap(out.rows[i - 1], out.rows[static_cast<std::size_t>(shuffler.below(i))]);

    auto& sc = out.sidecar;
    sc["generator"] = Rng::kAlgorithm;
    sc["seed"] = seed;
    sc["scenario"] = spec.to_json();
    sc["boundaries"] = bounds;
    nlohmann::ordered_json cj;
    std::uint64_t total = 0;
    for (Category c : kAllCategories) {
        const auto& counts = census[static_cast<std::size_t>(c)];
        cj[std::string(to_string(c))] = counts;
        for (auto v : counts) total += v;
    }
    sc["census"] = cj;
    sc["total"] = total;
    sc["slices"] = std::move(slices);
    return out;
}

void write_ledger(const std::filesystem::path& path, std::span<const TransferRecord> rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << "from,to,fromIsContract,toIsContract,timestamp\n";
    for (const auto& r : rows)
        f << r.sender_id << ',' << r.receiver_id << ',' << (r.sender_is_contract ? '1' : '0') << ','
          << (r.receiver_is_contract ? '1' : '0') << ',' << r.timestamp << '\n';
    if (!f) throw IoError("write failed: " + path.string());
}

void fabricate_ledger(const ScenarioSpec& spec, Seed seed, const std::filesystem::path& ledger_path,
                      const std::filesystem::path& sidecar_path) {
    const FabricatedLedger fab = fabricate(spec, seed);
    write_ledger(ledger_path, fab.rows);
    std::ofstream f(sidecar_path, std::ios::binary);
    if (!f) throw IoError("cannot write " + sidecar_path.string());
    f << fab.sidecar.dump(2) << '\n';
    if (!f) throw IoError("write failed: " + sidecar_path.string());
}

}  // namespace tokscale
