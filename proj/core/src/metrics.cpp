#include "lineid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lineid {

namespace {

std::string format_number(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

void RmspeAccumulator::add(double t, Vec2 est, Vec2 truth) {
    if (!window_.contains(t)) return;
    for (int i = 0; i < 2; ++i) {
        if (truth[i] == 0.0) throw std::domain_error("rmspe: zero truth value inside window '" + window_.label + "'");
        const double rel = (est[i] - truth[i]) / truth[i];
        sum_sq_[i] += rel * rel;
    }
    ++n_;
}

double RmspeAccumulator::percent(int param_index) const {
    if (n_ == 0) throw std::domain_error("rmspe: window '" + window_.label + "' contains no samples");
    return std::sqrt(sum_sq_[param_index] / static_cast<double>(n_)) * 100.0;
}

double rmspe(const ParamSeries& est, const ParamSeries& truth, const RmspeWindow& window, int param_index) {
    if (param_index < 0 || param_index > 1) throw std::invalid_argument("rmspe: param_index must be 0 or 1");
    if (est.t.size() != truth.t.size() || est.theta.size() != est.t.size() ||
        truth.theta.size() != truth.t.size()) {
        throw std::invalid_argument("rmspe: series lengths differ");
    }
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < est.t.size(); ++k) {
        if (est.t[k] != truth.t[k]) throw std::invalid_argument("rmspe: series are not aligned on timestamps");
        if (!window.contains(est.t[k])) continue;
        const double ref = truth.theta[k][param_index];
        if (ref == 0.0) throw std::domain_error("rmspe: zero truth value inside window '" + window.label + "'");
        const double rel = (est.theta[k][param_index] - ref) / ref;
        sum_sq += rel * rel;
        ++n;
    }
    if (n == 0) throw std::domain_error("rmspe: window '" + window.label + "' contains no samples");
    return std::sqrt(sum_sq / static_cast<double>(n)) * 100.0;
}

const RmspeRow& RmspeReport::at(const std::string& estimator, const std::string& window_label) const {
    for (const auto& r : rows) {
        if (r.estimator == estimator && r.window_label == window_label) return r;
    }
    throw std::out_of_range("report has no row for " + estimator + " / " + window_label);
}

std::string RmspeReport::to_csv() const {
    std::string out = "estimator,window_label,rmspe_r_pct,rmspe_l_pct,n_samples\n";
    for (const auto& r : rows) {
        out += r.estimator + "," + r.window_label + "," + format_number(r.r_pct, "%.6f") + "," +
               format_number(r.l_pct, "%.6f") + "," + std::to_string(r.n) + "\n";
    }
    return out;
}

std::string RmspeReport::to_table() const {
    std::size_t w_est = std::string("estimator").size();
    std::size_t w_win = std::string("window").size();
    for (const auto& r : rows) {
        w_est = std::max(w_est, r.estimator.size());
        w_win = std::max(w_win, r.window_label.size());
    }
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size()), ' ');
        return s;
    };
    std::string out = pad("estimator", w_est) + "  " + pad("window", w_win) + "  " +
                      "   RMSPE R(%)   RMSPE L(%)   samples\n";
    for (const auto& r : rows) {
        char nums[96];
        std::snprintf(nums, sizeof nums, "  %12.4f %12.4f %9zu\n", r.r_pct, r.l_pct, r.n);
        out += pad(r.estimator, w_est) + "  " + pad(r.window_label, w_win) + nums;
    }
    return out;
}

RmspeReport build_report(std::span<const ScoredRun> runs) {
    if (runs.empty()) throw std::invalid_argument("build_report: no runs to report");
    const auto& ref = runs.front().scores;
    RmspeReport report;
    for (const ScoredRun& run : runs) {
        if (run.scores.size() != ref.size()) throw std::invalid_argument("build_report: runs have different windows");
        for (std::size_t w = 0; w < ref.size(); ++w) {
            if (!(run.scores[w].window == ref[w].window)) {
                throw std::invalid_argument("build_report: window mismatch for '" + run.estimator + "'");
            }
        }
    }
    for (const ScoredRun& run : runs) {
        for (const WindowScore& s : run.scores) {
            report.rows.push_back({run.estimator, s.window.label, s.r_pct, s.l_pct, s.n});
        }
    }
    return report;
}

}  // namespace lineid
