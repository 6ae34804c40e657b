#pragma once

// Scenario orchestration: plant -> frame -> conditioning -> estimators -> metrics,
// plus the artifact writers and the ablation suites.

#include "lineid/config.hpp"

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lineid {

/// Everything visible after one simulation step.
struct StepView {
    double t = 0.0;
    LineParams truth;
    const MeasurementSample* measured = nullptr;
    Vec2 v_grid;
    FrameAngle frame;                          ///< estimation frame of this sample
    const RegressorSample* regressor = nullptr;  ///< d-axis regression row
    bool estimating = false;  ///< estimators consumed this sample
    std::span<const Estimator> estimators;
};

using StepObserver = std::function<void(const StepView&)>;

struct SimulationResult {
    std::vector<ScoredRun> scored;  ///< one per configured estimator
    std::string measurement_hash;   ///< FNV-1a 64 over every measured sample
    std::uint64_t undervoltage_events = 0;
    std::vector<Vec2> final_theta;
};

/// Runs one scenario in memory. Throws NumericalFault on non-finite state.
SimulationResult simulate(const ScenarioConfig& cfg, const StepObserver& observer = {});

struct RunArtifacts {
    std::filesystem::path timeseries_csv;
    std::filesystem::path report_csv;
    std::filesystem::path meta_json;
    std::filesystem::path measurements_csv;  ///< empty unless requested
    std::string config_hash;
    std::string measurement_hash;
    RmspeReport report;
};

/// Simulates and writes timeseries.csv, report.csv, run_meta.json and optionally
/// measurements.csv into cfg.output.dir. Files are replaced atomically.
RunArtifacts run_scenario(const ScenarioConfig& cfg);

enum class AblationSuite { Algorithms, Axes, FreqSource, Filters };

const char* to_string(AblationSuite s);
/// Throws ConfigError for an unknown name.
AblationSuite parse_suite(const std::string& name);

struct AblationVariant {
    std::string label;
    ScenarioConfig cfg;
};

/// Expands a suite into fully isolated scenario configurations sharing the base seed.
std::vector<AblationVariant> ablation_variants(const ScenarioConfig& base, AblationSuite suite);

struct AblationResult {
    RmspeReport report;
    std::vector<std::string> measurement_hashes;  ///< per variant, in report order
};

/// Runs the variants concurrently and merges their scores, labelled per variant.
AblationResult run_ablation_suite(const ScenarioConfig& base, AblationSuite suite);

/// Writes `content` to `path` through a sibling temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

const char* library_version();

}  // namespace lineid
