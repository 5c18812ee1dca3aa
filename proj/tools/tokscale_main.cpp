#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tokscale/errors.hpp"
#include "tokscale/ingest.hpp"
#include "tokscale/report.hpp"
#include "tokscale/synth.hpp"

namespace fs = std::filesystem;
using namespace tokscale;

namespace {

enum ExitCode : int { kOk = 0, kConfig = 1, kIo = 2, kParse = 3, kInternal = 4 };

/// Flags shared by census and analyze. Unset options leave the config file
/// value in place.
struct CommonFlags {
    std::string config;
    std::vector<std::string> inputs;
    std::optional<std::string> periods;
    std::optional<std::string> delimiter;
    bool no_header = false;
    bool fail_fast = false;
    std::optional<std::string> out;
};

struct AnalyzeFlags {
    std::optional<Seed> seed;
    std::optional<int> n_bins;
    std::optional<std::size_t> n_tail_min;
    std::optional<std::size_t> activity_floor;
    std::optional<std::string> kpss_variant;
    std::optional<std::string> kpss_bandwidth;
    std::optional<std::string> analyses;
    bool raw_fit = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("inputs", f.inputs, "Ledger files or directories (plain or .gz)");
    cmd->add_option("--config", f.config, "JSON run configuration");
    cmd->add_option("--periods", f.periods, "Period count k, or comma-separated boundaries (seconds or YYYY-MM-DD)");
    cmd->add_option("--delimiter", f.delimiter, "Field delimiter (single character)");
    cmd->add_flag("--no-header", f.no_header, "Input has no header row; columns are positional");
    cmd->add_flag("--fail-fast", f.fail_fast, "Abort on the first malformed row");
    cmd->add_option("--out", f.out, "Output directory");
}

RunConfig build_config(const CommonFlags& f) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_run_config(f.config);
    if (!f.inputs.empty()) cfg.inputs.assign(f.inputs.begin(), f.inputs.end());
    if (f.periods) cfg.ingest.periods = PeriodSpec::parse(*f.periods);
    if (f.delimiter) {
        if (f.delimiter->size() != 1) throw ConfigError("--delimiter: must be a single character");
        cfg.ingest.delimiter = (*f.delimiter)[0];
    }
    if (f.no_header) cfg.ingest.has_header = false;
    if (f.fail_fast) cfg.ingest.strictness = Strictness::FailFast;
    if (f.out) cfg.out_dir = *f.out;
    cfg.validate();
    return cfg;
}

void apply_analyze_flags(RunConfig& cfg, const AnalyzeFlags& f) {
    if (f.seed) cfg.seed = *f.seed;
    if (f.n_bins) cfg.n_bins = *f.n_bins;
    if (f.n_tail_min) cfg.n_tail_min = *f.n_tail_min;
    if (f.activity_floor) cfg.activity_floor = *f.activity_floor;
    if (f.kpss_variant) {
        auto v = parse_kpss_variant(*f.kpss_variant);
        if (!v) throw ConfigError("--kpss-variant: expected 'level' or 'trend'");
        cfg.kpss_variant = *v;
    }
    if (f.kpss_bandwidth) {
        nlohmann::json j;
        const auto& b = *f.kpss_bandwidth;
        if (!b.empty() && b.find_first_not_of("0123456789") == std::string::npos)
            j["bandwidth"] = std::stoll(b);
        else
            j["bandwidth"] = b;
        nlohmann::json wrapper;
        wrapper["kpss"] = j;
        cfg.apply_json(wrapper);
    }
    if (f.analyses) {
        cfg.analyses = AnalysisToggles{false, false, false, false};
        std::string_view rest = *f.analyses;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto name = rest.substr(0, comma);
            if (name == "scaling") cfg.analyses.scaling = true;
            else if (name == "powerlaw") cfg.analyses.powerlaw = true;
            else if (name == "kpss") cfg.analyses.kpss = true;
            else if (name == "taylor") cfg.analyses.taylor = true;
            else if (name == "all") cfg.analyses = AnalysisToggles{};
            else if (name != "none" && !name.empty())
                throw ConfigError("--analyses: unknown analysis '" + std::string(name) + "'");
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }
    if (f.raw_fit) cfg.scaling_raw_fit = true;
    cfg.validate();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << text;
    if (!f) throw IoError("write failed: " + path.string());
}

int run_census(const CommonFlags& flags) {
    const RunConfig cfg = build_config(flags);
    if (cfg.inputs.empty()) throw ConfigError("no input files given");
    const DatasetSummary summary = ingest_census(cfg.inputs, cfg.ingest);
    const std::string json = summary_to_json(summary).dump(2) + "\n";
    if (cfg.out_dir.empty()) {
        std::cout << json;
    } else {
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string());
        write_text(cfg.out_dir / "census.json", json);
        write_text(cfg.out_dir / "table1_census.tsv", census_table(summary));
        std::cerr << "census written to " << cfg.out_dir.string() << "\n";
    }
    std::cerr << summary.total << " rows counted, " << summary.malformed_rows << " malformed, "
              << summary.out_of_span_rows << " outside the period span\n";
    return kOk;
}

int run_analyze(const CommonFlags& flags, const AnalyzeFlags& extra) {
    RunConfig cfg = build_config(flags);
    apply_analyze_flags(cfg, extra);
    if (cfg.out_dir.empty()) throw ConfigError("--out: an output directory is required");
    std::cerr << "analyzing " << cfg.inputs.size() << " input path(s)\n";
    const AnalysisOutput out = run_analysis(cfg);
    const auto problems = validate_report(out.report);
    if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "report schema violation: " << p << "\n";
        return kInternal;
    }
    write_output(out, cfg.out_dir);
    std::cerr << "report written to " << (cfg.out_dir / "report.json").string() << "\n";
    return kOk;
}

int run_synth(const std::string& scenario_path, std::optional<Seed> seed, const std::string& out) {
    std::ifstream f(scenario_path);
    if (!f) throw IoError("cannot read scenario file " + scenario_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("scenario file " + scenario_path + ": " + e.what());
    }
    const ScenarioSpec spec = ScenarioSpec::from_json(j);
    spec.validate();
    const Seed s = seed ? *seed : spec.seed.value_or(0);
    const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    const fs::path sidecar = dir / "ledger.sidecar.json";
    fabricate_ledger(spec, s, dir / "ledger.csv", sidecar);
    std::cout << sidecar.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Token-transfer interaction scaling and stationarity analysis"};
    app.require_subcommand(1);

    CommonFlags census_flags;
    auto* census = app.add_subcommand("census", "Count transfers per interaction category and period");
    add_common(census, census_flags);

    CommonFlags analyze_flags;
    AnalyzeFlags analyze_extra;
    auto* analyze = app.add_subcommand("analyze", "Run the scaling, tail, stationarity and Taylor analyses");
    add_common(analyze, analyze_flags);
    analyze->add_option("--seed", analyze_extra.seed, "Seed recorded in the provenance block");
    analyze->add_option("--n-bins", analyze_extra.n_bins, "Logarithmic bins for the scaling fit (default 20)");
    analyze->add_option("--n-tail-min", analyze_extra.n_tail_min, "Smallest admissible tail size (default 50)");
    analyze->add_option("--activity-floor", analyze_extra.activity_floor,
                        "Minimum non-zero hours for KPSS and Taylor (default 10)");
    analyze->add_option("--kpss-variant", analyze_extra.kpss_variant, "level or trend");
    analyze->add_option("--kpss-bandwidth", analyze_extra.kpss_bandwidth, "newey-west, schwert, or a fixed lag");
    analyze->add_option("--analyses", analyze_extra.analyses,
                        "Comma-separated subset of scaling,powerlaw,kpss,taylor (or all/none)");
    analyze->add_flag("--raw-fit", analyze_extra.raw_fit, "Also report the unbinned scaling fit");

    std::string scenario;
    std::optional<Seed> synth_seed;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Fabricate a ledger and its ground-truth sidecar");
    synth->add_option("scenario", scenario, "Scenario JSON file")->required();
    synth->add_option("--seed", synth_seed, "Generator seed (overrides the scenario)");
    synth->add_option("--out", synth_out, "Output directory (default: current directory)");

    app.add_subcommand("version", "Print the tool version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*census) return run_census(census_flags);
        if (*analyze) return run_analyze(analyze_flags, analyze_extra);
        if (*synth) return run_synth(scenario, synth_seed, synth_out);
        std::cout << kToolName << " " << kToolVersion << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}
