#include "tokscale/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "tokscale/aggregation.hpp"
#include "tokscale/errors.hpp"
#include "tokscale/powerlaw_fit.hpp"
#include "tokscale/scaling_fit.hpp"
#include "tokscale/taylor.hpp"

namespace tokscale {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
    ingest.validate();
    if (n_bins < 1) throw ConfigError("n_bins: must be >= 1");
    if (n_tail_min < 2) throw ConfigError("n_tail_min: must be >= 2");
}

namespace {

template <typename T>
T json_get(const nlohmann::json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(path + ": wrong type");
    }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw ConfigError(where + (where.empty() ? "" : ".") + key + ": unknown key");
}

KpssBandwidth parse_bandwidth(const nlohmann::json& j) {
    if (j.is_number_integer()) {
        const auto l = j.get<std::int64_t>();
        if (l < 0) throw ConfigError("kpss.bandwidth: lag must be >= 0");
        return KpssBandwidth::fixed(static_cast<std::size_t>(l));
    }
    const auto name = json_get<std::string>(j, "kpss.bandwidth");
    if (name == "newey-west" || name == "auto") return KpssBandwidth::newey_west();
    if (name == "schwert") return KpssBandwidth::schwert();
    throw ConfigError("kpss.bandwidth: expected 'newey-west', 'schwert' or a lag");
}

Json bandwidth_json(const KpssBandwidth& b) {
    switch (b.rule) {
        case KpssBandwidth::Rule::NeweyWest: return "newey-west";
        case KpssBandwidth::Rule::Schwert: return "schwert";
        case KpssBandwidth::Rule::Fixed: return b.lag;
    }
    return nullptr;
}

}  // namespace

void RunConfig::apply_json(const nlohmann::json& j) {
    reject_unknown(j, {"inputs", "ingest", "analyses", "scaling_raw_fit", "n_bins", "n_tail_min",
                       "activity_floor", "kpss", "out", "seed"},
                   "");
    if (j.contains("inputs")) {
        inputs.clear();
        for (const auto& p : j.at("inputs")) inputs.emplace_back(json_get<std::string>(p, "inputs"));
    }
    if (j.contains("ingest")) {
        const auto& in = j.at("ingest");
        reject_unknown(in, {"columns", "delimiter", "has_header", "periods", "fail_fast"}, "ingest");
        if (in.contains("columns")) {
            const auto& c = in.at("columns");
            reject_unknown(c, {"from", "to", "fromIsContract", "toIsContract", "timestamp"}, "ingest.columns");
            auto col = [&](const char* key, std::string& dst) {
                if (!c.contains(key)) return;
                const auto& v = c.at(key);
                dst = v.is_number_integer() ? std::to_string(v.get<std::int64_t>())
                                            : json_get<std::string>(v, std::string("ingest.columns.") + key);
            };
            col("from", ingest.columns.from);
            col("to", ingest.columns.to);
            col("fromIsContract", ingest.columns.from_is_contract);
            col("toIsContract", ingest.columns.to_is_contract);
            col("timestamp", ingest.columns.timestamp);
        }
        if (in.contains("delimiter")) {
            const auto d = json_get<std::string>(in.at("delimiter"), "ingest.delimiter");
            if (d.size() != 1) throw ConfigError("ingest.delimiter: must be a single character");
            ingest.delimiter = d[0];
        }
        if (in.contains("has_header")) ingest.has_header = json_get<bool>(in.at("has_header"), "ingest.has_header");
        if (in.contains("fail_fast"))
            ingest.strictness = json_get<bool>(in.at("fail_fast"), "ingest.fail_fast") ? Strictness::FailFast
                                                                                        : Strictness::SkipAndCount;
        if (in.contains("periods")) {
            const auto& p = in.at("periods");
            if (p.is_number_integer()) {
                ingest.periods = PeriodSpec{static_cast<int>(p.get<std::int64_t>()), {}};
            } else if (p.is_array()) {
                std::string joined;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    if (i) joined += ',';
                    joined += p[i].is_number_integer() ? std::to_string(p[i].get<std::int64_t>())
                                                       : json_get<std::string>(p[i], "ingest.periods");
                }
                ingest.periods = PeriodSpec::parse(joined);
            } else {
                throw ConfigError("ingest.periods: expected a count or a boundary list");
            }
        }
    }
    if (j.contains("analyses")) {
        const auto& a = j.at("analyses");
        reject_unknown(a, {"scaling", "powerlaw", "kpss", "taylor"}, "analyses");
        if (a.contains("scaling")) analyses.scaling = json_get<bool>(a.at("scaling"), "analyses.scaling");
        if (a.contains("powerlaw")) analyses.powerlaw = json_get<bool>(a.at("powerlaw"), "analyses.powerlaw");
        if (a.contains("kpss")) analyses.kpss = json_get<bool>(a.at("kpss"), "analyses.kpss");
        if (a.contains("taylor")) analyses.taylor = json_get<bool>(a.at("taylor"), "analyses.taylor");
    }
    if (j.contains("scaling_raw_fit")) scaling_raw_fit = json_get<bool>(j.at("scaling_raw_fit"), "scaling_raw_fit");
    if (j.contains("n_bins")) n_bins = json_get<int>(j.at("n_bins"), "n_bins");
    if (j.contains("n_tail_min")) n_tail_min = json_get<std::size_t>(j.at("n_tail_min"), "n_tail_min");
    if (j.contains("activity_floor")) activity_floor = json_get<std::size_t>(j.at("activity_floor"), "activity_floor");
    if (j.contains("kpss")) {
        const auto& k = j.at("kpss");
        reject_unknown(k, {"variant", "bandwidth"}, "kpss");
        if (k.contains("variant")) {
            auto v = parse_kpss_variant(json_get<std::string>(k.at("variant"), "kpss.variant"));
            if (!v) throw ConfigError("kpss.variant: expected 'level' or 'trend'");
            kpss_variant = *v;
        }
        if (k.contains("bandwidth")) kpss_bandwidth = parse_bandwidth(k.at("bandwidth"));
    }
    if (j.contains("out")) out_dir = json_get<std::string>(j.at("out"), "out");
    if (j.contains("seed")) seed = json_get<Seed>(j.at("seed"), "seed");
}

Json RunConfig::to_json() const {
    Json j;
    Json in = Json::array();
    for (const auto& p : inputs) in.push_back(p.generic_string());
    j["inputs"] = in;
    Json ing;
    ing["columns"] = {{"from", ingest.columns.from},
                      {"to", ingest.columns.to},
                      {"fromIsContract", ingest.columns.from_is_contract},
                      {"toIsContract", ingest.columns.to_is_contract},
                      {"timestamp", ingest.columns.timestamp}};
    ing["delimiter"] = std::string(1, ingest.delimiter);
    ing["has_header"] = ingest.has_header;
    if (ingest.periods.boundaries.empty())
        ing["periods"] = ingest.periods.k;
    else
        ing["periods"] = ingest.periods.boundaries;
    ing["fail_fast"] = ingest.strictness == Strictness::FailFast;
    j["ingest"] = ing;
    j["analyses"] = {{"scaling", analyses.scaling},
                     {"powerlaw", analyses.powerlaw},
                     {"kpss", analyses.kpss},
                     {"taylor", analyses.taylor}};
    j["scaling_raw_fit"] = scaling_raw_fit;
    j["n_bins"] = n_bins;
    j["n_tail_min"] = n_tail_min;
    j["activity_floor"] = activity_floor;
    j["kpss"] = {{"variant", std::string(to_string(kpss_variant))}, {"bandwidth", bandwidth_json(kpss_bandwidth)}};
    j["out"] = out_dir.generic_string();
    j["seed"] = seed;
    return j;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    RunConfig cfg;
    cfg.apply_json(j);
    return cfg;
}

// ---------------------------------------------------------------------------
// Serialization helpers

namespace {

std::string fmt_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

Json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

std::string slice_file(const char* table, Category c, int period, const char* role) {
    return std::string(table) + "_" + std::string(to_string(c)) + "_" + std::to_string(period) + "_" + role + ".dat";
}

}  // namespace

Json summary_to_json(const DatasetSummary& s) {
    Json j;
    j["periods"] = s.counts.size();
    j["boundaries"] = s.boundaries;
    Json dates = Json::array();
    for (auto b : s.boundaries) dates.push_back(to_utc_date(b));
    j["boundary_dates"] = dates;
    Json counts;
    Json totals;
    for (Category c : kAllCategories) {
        Json per = Json::array();
        for (const auto& p : s.counts) per.push_back(p[static_cast<std::size_t>(c)]);
        counts[std::string(to_string(c))] = per;
        totals[std::string(to_string(c))] = s.category_total(c);
    }
    j["counts"] = counts;
    j["category_totals"] = totals;
    j["total"] = s.total;
    j["rows_read"] = s.rows_read;
    j["malformed_rows"] = s.malformed_rows;
    j["out_of_span_rows"] = s.out_of_span_rows;
    if (s.min_ts && s.max_ts)
        j["span"] = {{"min_ts", *s.min_ts},
                     {"max_ts", *s.max_ts},
                     {"min_date", to_utc_date(*s.min_ts)},
                     {"max_date", to_utc_date(*s.max_ts)}};
    else
        j["span"] = nullptr;
    return j;
}

std::string census_table(const DatasetSummary& s) {
    std::ostringstream o;
    o << "fromIsContract\ttoIsContract\tcategory";
    for (std::size_t p = 0; p < s.counts.size(); ++p) o << "\tperiod_" << p + 1;
    o << "\ttotal\n";
    for (Category c : kAllCategories) {
        const auto ci = static_cast<unsigned>(c);
        o << (ci >> 1) << '\t' << (ci & 1) << '\t' << to_string(c);
        for (const auto& p : s.counts) o << '\t' << p[ci];
        o << '\t' << s.category_total(c) << '\n';
    }
    return o.str();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 init failed");
    std::vector<char> buf(1 << 16);
    while (f) {
        f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (f.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(f.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char b[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(b, sizeof b, "%02x", md[i]);
        hex += b;
    }
    return hex;
}

Json provenance_block(const RunConfig& cfg) {
    Json p;
    p["tool"] = kToolName;
    p["version"] = kToolVersion;
    p["seed"] = cfg.seed;
    p["rng"] = Rng::kAlgorithm;
    // The output location does not affect results, so reports stay identical
    // across output directories.
    Json config = cfg.to_json();
    config.erase("out");
    p["config"] = config;
    Json inputs = Json::array();
    for (const auto& path : expand_inputs(cfg.inputs))
        inputs.push_back({{"path", path.generic_string()},
                          {"bytes", fs::file_size(path)},
                          {"sha256", sha256_file(path)}});
    p["inputs"] = inputs;
    return p;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

Json slice_key(Category c, int period) {
    Json j;
    j["category"] = std::string(to_string(c));
    j["period"] = period;
    return j;
}

Json slice_key(Category c, int period, Role r) {
    Json j = slice_key(c, period);
    j["role"] = std::string(to_string(r));
    return j;
}

Json absent(Json key, const std::string& reason) {
    key["status"] = "absent";
    key["reason"] = reason;
    return key;
}

const char* ks_band(double d) {
    if (d < 0.05) return "close";
    if (d <= 0.1) return "moderate";
    return "poor";
}

}  // namespace

AnalysisOutput analyze_ledger(const Ledger& ledger, const RunConfig& cfg, Json provenance) {
    cfg.validate();
    AnalysisOutput out;
    Json& rep = out.report;
    rep["schema"] = "tokscale.report";
    rep["schema_version"] = kReportSchemaVersion;
    rep["provenance"] = std::move(provenance);

    std::optional<PeriodPartition> partition;
    DatasetSummary summary;
    if (!cfg.ingest.periods.boundaries.empty()) {
        partition = PeriodPartition::from_boundaries(cfg.ingest.periods.boundaries);
    } else if (ledger.min_ts) {
        partition = make_partition(cfg.ingest.periods, *ledger.min_ts, *ledger.max_ts);
    }
    if (partition) {
        summary = census_ledger(ledger, *partition);
    } else {
        summary.counts.assign(static_cast<std::size_t>(cfg.ingest.periods.k), std::array<std::uint64_t, 4>{});
        summary.rows_read = ledger.stats.rows_read;
        summary.malformed_rows = ledger.stats.malformed_rows;
    }
    rep["census"] = summary_to_json(summary);
    out.files.push_back({"table1_census.tsv", census_table(summary)});

    const auto& a = cfg.analyses;
    if (!(a.scaling || a.powerlaw || a.kpss || a.taylor)) return out;

    Json scaling = Json::array(), powerlaw = Json::array(), stationarity = Json::array(), taylor = Json::array();
    std::ostringstream t2, t3, t4, t5;
    t2 << "category\tperiod\talpha\tintercept\tr2\tn_bins\tn_profiles\n";
    t3 << "category\tperiod\trole\tgamma\tx_min\tstd_error\tks_distance\tllr\tp_value\tn_tail\tverdict\n";
    t4 << "category\tperiod\trole\ttested\tstationary\tpercentage\tactivity_floor\n";
    t5 << "category\tperiod\trole\tbeta\tlog_a\ta\tr2\tn_accounts\n";

    const int k = static_cast<int>(summary.counts.size());
    for (Category c : kAllCategories) {
        for (int p = 1; p <= k; ++p) {
            std::vector<Transfer> slice;
            HourWindow window{};
            if (partition) {
                slice = slice_of(ledger, c, *partition, p);
                window = {partition->period_start(p), partition->period_end(p)};
            }
            const std::string cname(to_string(c));

            if (a.scaling) {
                Json key = slice_key(c, p);
                const auto profiles = sender_profiles(slice);
                if (profiles.empty()) {
                    scaling.push_back(absent(key, "no transfers in slice"));
                } else {
                    try {
                        const auto curve = log_bin(std::span<const SenderProfile>(profiles), cfg.n_bins);
                        std::ostringstream dat;
                        dat << "# mean_N\tmean_V\tcount\n";
                        for (const auto& b : curve.bins)
                            dat << fmt_double(b.abscissa) << '\t' << fmt_double(b.mean_volume) << '\t' << b.count << '\n';
                        out.files.push_back({slice_file("table2", c, p, "sender"), dat.str()});
                        const auto fit = fit_alpha(curve);
                        key["status"] = "ok";
                        key["alpha"] = num(fit.alpha);
                        key["intercept"] = num(fit.intercept);
                        key["r2"] = num(fit.r2);
                        key["alpha_stderr"] = num(fit.alpha_stderr);
                        key["n_points"] = fit.n_points;
                        key["n_profiles"] = profiles.size();
                        if (cfg.scaling_raw_fit) {
                            const auto pts = to_scatter(profiles);
                            try {
                                const auto raw = fit_alpha_raw(pts);
                                key["raw_fit"] = {{"alpha", num(raw.alpha)}, {"intercept", num(raw.intercept)}, {"r2", num(raw.r2)}};
                            } catch (const InsufficientDataError&) {
                                key["raw_fit"] = nullptr;
                            }
                        }
                        scaling.push_back(key);
                        t2 << cname << '\t' << p << '\t' << fmt_double(fit.alpha) << '\t' << fmt_double(fit.intercept)
                           << '\t' << fmt_double(fit.r2) << '\t' << fit.n_points << '\t' << profiles.size() << '\n';
                    } catch (const std::runtime_error& e) {
                        scaling.push_back(absent(key, e.what()));
                    }
                }
            }

            for (Role role : kAllRoles) {
                const char* rname = role == Role::Sender ? "sender" : "receiver";
                if (a.powerlaw) {
                    Json key = slice_key(c, p, role);
                    const DegreeSample sample = degree_sample(slice, role);
                    try {
                        const auto r = analyze_tail(sample, TailFitConfig{cfg.n_tail_min, 0.05});
                        key["status"] = "ok";
                        key["gamma"] = num(r.gamma);
                        key["x_min"] = r.x_min;
                        key["sigma_gamma"] = num(r.sigma_gamma);
                        key["ks_distance"] = num(r.ks_distance);
                        key["ks_band"] = ks_band(r.ks_distance);
                        key["llr"] = num(r.llr);
                        key["p_value"] = num(r.p_value);
                        key["lambda"] = num(r.lambda);
                        key["n_tail"] = r.n_tail;
                        key["n_sample"] = r.n_sample;
                        key["indistinguishable"] = r.indistinguishable;
                        key["verdict"] = std::string(to_string(r.verdict));
                        powerlaw.push_back(key);
                        t3 << cname << '\t' << p << '\t' << rname << '\t' << fmt_double(r.gamma) << '\t' << r.x_min << '\t'
                           << fmt_double(r.sigma_gamma) << '\t' << fmt_double(r.ks_distance) << '\t'
                           << fmt_double(r.llr) << '\t' << fmt_double(r.p_value) << '\t' << r.n_tail << '\t'
                           << to_string(r.verdict) << '\n';
                    } catch (const std::runtime_error& e) {
                        powerlaw.push_back(absent(key, sample.values.empty() ? "no transfers in slice" : e.what()));
                    }
                    if (!sample.values.empty()) {
                        std::ostringstream dat;
                        dat << "# x\tdensity\n";
                        for (const auto& d : log_binned_density(sample.values, cfg.n_bins))
                            dat << fmt_double(d.x) << '\t' << fmt_double(d.density) << '\n';
                        out.files.push_back({slice_file("table3", c, p, rname), dat.str()});
                    }
                }

                if (a.kpss || a.taylor) {
                    StationarityCounter counter(StationarityConfig{cfg.activity_floor, cfg.kpss_variant, cfg.kpss_bandwidth});
                    TaylorCollector collector(cfg.activity_floor);
                    if (partition && !slice.empty()) {
                        for_each_hourly_series(slice, role, window, [&](const HourlySeries& s) {
                            if (a.kpss) counter.add(s);
                            if (a.taylor) collector.add(s);
                        });
                    }
                    if (a.kpss) {
                        Json key = slice_key(c, p, role);
                        const auto& t = counter.tally();
                        const auto pct = t.percentage();
                        key["status"] = pct ? "ok" : "absent";
                        if (!pct) key["reason"] = "no account passes the activity floor";
                        key["tested"] = t.tested;
                        key["stationary"] = t.stationary;
                        key["percentage"] = pct ? Json(*pct) : Json(nullptr);
                        key["skipped"] = t.skipped;
                        key["degenerate"] = t.degenerate;
                        key["activity_floor"] = cfg.activity_floor;
                        stationarity.push_back(key);
                        t4 << cname << '\t' << p << '\t' << rname << '\t' << t.tested << '\t' << t.stationary << '\t'
                           << (pct ? fmt_double(*pct) : std::string("NA")) << '\t' << cfg.activity_floor << '\n';
                    }
                    if (a.taylor) {
                        Json key = slice_key(c, p, role);
                        const TaylorCell cell = collector.finish();
                        if (cell.fit) {
                            const auto& f = *cell.fit;
                            key["status"] = "ok";
                            key["beta"] = num(f.b);
                            key["log_a"] = num(f.log_a);
                            key["a"] = num(f.a);
                            key["r2"] = num(f.r2);
                            key["beta_stderr"] = num(f.b_stderr);
                            key["log_a_stderr"] = num(f.log_a_stderr);
                            key["n_accounts"] = f.n_accounts;
                            key["excluded"] = f.excluded;
                            t5 << cname << '\t' << p << '\t' << rname << '\t' << fmt_double(f.b) << '\t'
                               << fmt_double(f.log_a) << '\t' << fmt_double(f.a) << '\t' << fmt_double(f.r2) << '\t'
                               << f.n_accounts << '\n';
                        } else {
                            key = absent(key, cell.absent_reason.empty() ? "no data" : cell.absent_reason);
                            key["n_accounts"] = cell.candidates;
                        }
                        taylor.push_back(key);
                        if (!collector.points().empty()) {
                            std::ostringstream dat;
                            if (cell.fit)
                                dat << "# fit: log10_var = " << fmt_double(cell.fit->log_a) << " + "
                                    << fmt_double(cell.fit->b) << " * log10_mu\n";
                            dat << "# log10_mu\tlog10_var\n";
                            std::vector<std::pair<double, double>> pts;
                            for (const auto& tp : collector.points())
                                if (tp.mu > 0 && tp.var > 0) pts.emplace_back(std::log10(tp.mu), std::log10(tp.var));
                            std::sort(pts.begin(), pts.end());
                            for (const auto& [x, y] : pts) dat << fmt_double(x) << '\t' << fmt_double(y) << '\n';
                            out.files.push_back({slice_file("table5", c, p, rname), dat.str()});
                        }
                    }
                }
            }
        }
    }

    if (a.scaling) {
        rep["scaling"] = std::move(scaling);
        out.files.push_back({"table2_scaling.tsv", t2.str()});
    }
    if (a.powerlaw) {
        rep["powerlaw"] = std::move(powerlaw);
        out.files.push_back({"table3_powerlaw.tsv", t3.str()});
    }
    if (a.kpss) {
        rep["stationarity"] = std::move(stationarity);
        out.files.push_back({"table4_stationarity.tsv", t4.str()});
    }
    if (a.taylor) {
        rep["taylor"] = std::move(taylor);
        out.files.push_back({"table5_taylor.tsv", t5.str()});
    }
    return out;
}

AnalysisOutput run_analysis(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.inputs.empty()) throw ConfigError("no input files given");
    Json provenance = provenance_block(cfg);
    const Ledger ledger = load_ledger(cfg.inputs, cfg.ingest);
    return analyze_ledger(ledger, cfg, std::move(provenance));
}

void write_output(const AnalysisOutput& out, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw IoError("cannot write " + (dir / name).string());
        f << content;
        if (!f) throw IoError("write failed: " + (dir / name).string());
    };
    write("report.json", out.report.dump(2) + "\n");
    for (const auto& f : out.files) write(f.name, f.content);
}

// ---------------------------------------------------------------------------
// Schema validation

namespace {

void require(const nlohmann::json& obj, std::initializer_list<const char*> keys, const std::string& where,
             std::vector<std::string>& problems) {
    if (!obj.is_object()) {
        problems.push_back(where + ": expected an object");
        return;
    }
    for (const char* k : keys)
        if (!obj.contains(k)) problems.push_back(where + ": missing '" + k + "'");
}

void check_section(const nlohmann::json& rep, const char* name, std::initializer_list<const char*> key_fields,
                   std::initializer_list<const char*> ok_fields, std::vector<std::string>& problems) {
    if (!rep.contains(name)) return;
    const auto& arr = rep.at(name);
    if (!arr.is_array()) {
        problems.push_back(std::string(name) + ": expected an array");
        return;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = std::string(name) + "[" + std::to_string(i) + "]";
        require(arr[i], key_fields, where, problems);
        require(arr[i], {"status"}, where, problems);
        if (!arr[i].is_object() || !arr[i].contains("status")) continue;
        const auto status = arr[i].at("status");
        if (status == "ok")
            require(arr[i], ok_fields, where, problems);
        else if (status == "absent")
            require(arr[i], {"reason"}, where, problems);
        else
            problems.push_back(where + ": status must be 'ok' or 'absent'");
    }
}

}  // namespace

std::vector<std::string> validate_report(const nlohmann::json& rep) {
    std::vector<std::string> problems;
    require(rep, {"schema", "schema_version", "provenance", "census"}, "report", problems);
    if (!problems.empty()) return problems;
    if (rep.at("schema_version") != kReportSchemaVersion)
        problems.push_back("report: unsupported schema_version");
    require(rep.at("provenance"), {"tool", "version", "seed", "rng", "config", "inputs"}, "provenance", problems);
    require(rep.at("census"),
            {"periods", "boundaries", "counts", "category_totals", "total", "rows_read", "malformed_rows",
             "out_of_span_rows", "span"},
            "census", problems);
    if (rep.at("census").is_object() && rep.at("census").contains("counts"))
        for (Category c : kAllCategories)
            if (!rep.at("census").at("counts").contains(std::string(to_string(c))))
                problems.push_back("census.counts: missing '" + std::string(to_string(c)) + "'");
    check_section(rep, "scaling", {"category", "period"}, {"alpha", "intercept", "r2", "n_points"}, problems);
    check_section(rep, "powerlaw", {"category", "period", "role"},
                  {"gamma", "x_min", "sigma_gamma", "ks_distance", "llr", "p_value", "n_tail", "verdict"}, problems);
    check_section(rep, "stationarity", {"category", "period", "role"},
                  {"tested", "stationary", "percentage", "activity_floor"}, problems);
    check_section(rep, "taylor", {"category", "period", "role"}, {"beta", "log_a", "a", "r2", "n_accounts"}, problems);
    return problems;
}

}  // namespace tokscale
