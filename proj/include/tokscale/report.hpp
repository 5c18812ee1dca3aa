#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "tokscale/ingest.hpp"
#include "tokscale/stationarity.hpp"
#include "tokscale/synth.hpp"

namespace tokscale {

inline constexpr const char* kToolName = "tokscale";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

struct AnalysisToggles {
    bool scaling = true;
    bool powerlaw = true;
    bool kpss = true;
    bool taylor = true;
};

/// Everything a run depends on. Loadable from a JSON config file whose keys
/// mirror these fields; command-line flags are applied afterwards.
struct RunConfig {
    std::vector<std::filesystem::path> inputs;
    IngestConfig ingest;
    AnalysisToggles analyses;
    bool scaling_raw_fit = false;
    int n_bins = 20;
    std::size_t n_tail_min = 50;
    std::size_t activity_floor = 10;
    KpssVariant kpss_variant = KpssVariant::Level;
    KpssBandwidth kpss_bandwidth = KpssBandwidth::newey_west();
    std::filesystem::path out_dir;
    Seed seed = 0;

    void validate() const;
    /// Overlays the keys present in `j`; unknown keys are rejected.
    void apply_json(const nlohmann::json& j);
    Json to_json() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

Json summary_to_json(const DatasetSummary& s);

/// Tab-separated table body with a header row.
std::string census_table(const DatasetSummary& s);

struct OutputFile {
    std::string name;
    std::string content;
};

struct AnalysisOutput {
    Json report;
    std::vector<OutputFile> files;  // tables and plot data, in write order
};

/// Loads the inputs and runs every enabled stage over every slice. Stage
/// failures are recorded per slice; only I/O, parse (fail-fast) and config
/// errors escape.
AnalysisOutput run_analysis(const RunConfig& cfg);

/// Same, over an already-loaded ledger.
AnalysisOutput analyze_ledger(const Ledger& ledger, const RunConfig& cfg, Json provenance);

Json provenance_block(const RunConfig& cfg);

/// report.json plus every table and plot file under `dir`.
void write_output(const AnalysisOutput& out, const std::filesystem::path& dir);

/// Problems found in a report; empty when it conforms to the schema.
std::vector<std::string> validate_report(const nlohmann::json& report);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace tokscale
