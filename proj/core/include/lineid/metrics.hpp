#pragma once

#include "lineid/linalg.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lineid {

/// Scoring window on [t_start, t_end).
struct RmspeWindow {
    double t_start = 0.0;
    double t_end = 0.0;
    std::string label;

    bool contains(double t) const { return t >= t_start && t < t_end; }
    friend bool operator==(const RmspeWindow&, const RmspeWindow&) = default;
};

/// Time-aligned parameter trajectory.
struct ParamSeries {
    std::vector<double> t;
    std::vector<Vec2> theta;

    void push(double time, Vec2 value) {
        t.push_back(time);
        theta.push_back(value);
    }
};

/// Streaming root-mean-square percent error for one window, both parameters.
class RmspeAccumulator {
public:
    explicit RmspeAccumulator(RmspeWindow window) : window_(std::move(window)) {}

    /// Throws std::domain_error for a zero truth value inside the window.
    void add(double t, Vec2 estimate, Vec2 truth);

    std::size_t count() const { return n_; }
    /// Percent for parameter 0 (R) or 1 (w0 L). Throws std::domain_error on an empty window.
    double percent(int param_index) const;
    const RmspeWindow& window() const { return window_; }

private:
    RmspeWindow window_;
    double sum_sq_[2] = {0.0, 0.0};
    std::size_t n_ = 0;
};

/// sqrt(mean(((est - truth) / truth)^2)) * 100 over samples with t in the window.
/// Throws std::invalid_argument for misaligned series and std::domain_error
/// for an empty window or a zero truth value.
double rmspe(const ParamSeries& estimates, const ParamSeries& truth, const RmspeWindow& window,
             int param_index);

struct WindowScore {
    RmspeWindow window;
    double r_pct = 0.0;
    double l_pct = 0.0;
    std::size_t n = 0;
};

/// One estimator (or ablation variant) scored over a set of windows.
struct ScoredRun {
    std::string estimator;
    std::vector<WindowScore> scores;
};

struct RmspeRow {
    std::string estimator;
    std::string window_label;
    double r_pct = 0.0;
    double l_pct = 0.0;
    std::size_t n = 0;
};

struct RmspeReport {
    std::vector<RmspeRow> rows;

    /// Throws std::out_of_range if the cell is absent.
    const RmspeRow& at(const std::string& estimator, const std::string& window_label) const;

    /// estimator,window_label,rmspe_r_pct,rmspe_l_pct,n_samples
    std::string to_csv() const;
    /// Aligned plain-text table.
    std::string to_table() const;
};

/// Rows ordered by estimator (input order) then window (configured order).
/// Throws std::invalid_argument on an empty run list or runs whose windows differ.
RmspeReport build_report(std::span<const ScoredRun> runs);

}  // namespace lineid
