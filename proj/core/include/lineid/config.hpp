#pragma once

// Scenario configuration: a flat, typed key = value text file with dotted
// section names. One file fully determines a run; missing keys take the
// documented defaults, unknown keys are rejected.
//
//   # comment
//   sim.t_end = 40
//   estimator.kind = vdf_rls, kalman, rls, cf_rls
//   metrics.windows = 15:20:with_excitation, 35:40:without_excitation

#include "lineid/conditioning.hpp"
#include "lineid/estimators.hpp"
#include "lineid/metrics.hpp"
#include "lineid/plant.hpp"
#include "lineid/pll.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lineid {

struct NoiseConfig {
    bool enabled = true;
    double sigma_v = 0.0;  ///< volts, per channel and sample
    double sigma_i = 0.0;  ///< amperes, per channel and sample
    std::uint64_t seed = 1;
};

struct OutputConfig {
    std::string dir = "out";
    bool emit_truth = false;         ///< measurement CSV with ground-truth columns
    bool emit_measurements = false;  ///< measurement CSV without truth columns
    std::size_t stride = 20;         ///< time-series CSV keeps every stride-th step
};

struct GridConfig {
    double v_ll_rms = 480.0;
    double freq_hz = 59.99;
    double phase0 = 0.0;
    double freq_ramp_hz_per_s = 0.0;

    /// Phase-peak magnitude of the line-to-line rms rating.
    double v_phase_peak() const;
    GridSource source() const;
};

struct ScenarioConfig {
    double dt = 5e-5;
    double t_end = 40.0;
    double estimation_start = 2.0;

    GridConfig grid;
    LineSchedule line;
    SetpointSchedule schedule;
    NoiseConfig noise;

    double tau_track = 0.01;
    double primary_crossover_hz = 20.0;
    double primary_zero_ratio = 10.0;

    FreqSourceConfig freq_source;
    ConditioningConfig conditioning;
    std::vector<EstimatorSpec> estimators;
    std::vector<RmspeWindow> windows;
    OutputConfig output;

    /// Non-fatal findings from validation (e.g. the BPF-vs-PLL bandwidth rule).
    std::vector<std::string> warnings;

    std::size_t step_count() const;
};

/// Every documented default.
ScenarioConfig default_config();

/// Throws ConfigError with every problem found (parse errors carry line numbers).
ScenarioConfig parse_config(std::string_view text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Invariant violations; warnings are appended to `warnings` when given.
std::vector<std::string> validate(const ScenarioConfig& cfg, std::vector<std::string>* warnings = nullptr);

/// Canonical key = value serialization; parse_config(to_text(c)) reproduces c.
std::string to_text(const ScenarioConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

EstimatorSpec default_estimator(EstimatorKind kind);

}  // namespace lineid
