#include "lineid/config.hpp"

#include "lineid/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace lineid {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + num(v[k]);
    return out;
}

/// Typed readers that record errors instead of throwing, so that every
/// problem in a file is reported at once.
class Reader {
public:
    Reader(std::map<std::string, Entry> entries, std::string source)
        : entries_(std::move(entries)), source_(std::move(source)) {}

    std::vector<std::string>& errors() { return errors_; }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    void number(const std::string& key, double& out) {
        if (auto e = take(key)) {
            if (auto v = parse_number(key, *e)) out = *v;
        }
    }

    void count(const std::string& key, std::size_t& out) {
        double v = static_cast<double>(out);
        if (!has(key)) return;
        const int line = entries_.at(key).line;
        number(key, v);
        if (v < 0 || v != std::floor(v)) {
            fail(key, line, "expected a non-negative integer");
            return;
        }
        out = static_cast<std::size_t>(v);
    }

    void seed(const std::string& key, std::uint64_t& out) {
        if (auto e = take(key)) {
            char* end = nullptr;
            errno = 0;
            const unsigned long long v = std::strtoull(e->value.c_str(), &end, 10);
            if (errno != 0 || end == e->value.c_str() || *end != '\0' || e->value.front() == '-') {
                fail(key, e->line, "expected an unsigned integer, got '" + e->value + "'");
            } else {
                out = v;
            }
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (auto e = take(key)) {
            if (e->value == "true") {
                out = true;
            } else if (e->value == "false") {
                out = false;
            } else {
                fail(key, e->line, "expected true or false, got '" + e->value + "'");
            }
        }
    }

    void text(const std::string& key, std::string& out) {
        if (auto e = take(key)) out = e->value;
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        auto e = take(key);
        if (!e) return std::nullopt;
        std::vector<double> out;
        for (const std::string& item : split(e->value, ',')) {
            auto v = parse_number(key, {item, e->line});
            if (!v) return std::nullopt;
            out.push_back(*v);
        }
        return out;
    }

    std::optional<std::vector<std::string>> words(const std::string& key) {
        auto e = take(key);
        if (!e) return std::nullopt;
        return split(e->value, ',');
    }

    /// Raw access for keys with custom syntax.
    std::optional<Entry> take(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        Entry e = it->second;
        used_.insert(key);
        return e;
    }

    void fail(const std::string& key, int line, const std::string& msg) {
        errors_.push_back(source_ + ":" + std::to_string(line) + ": " + key + ": " + msg);
    }

    void reject_unknown() {
        for (const auto& [key, e] : entries_) {
            if (!used_.count(key)) fail(key, e.line, "unknown key");
        }
    }

private:
    std::optional<double> parse_number(const std::string& key, const Entry& e) {
        const char* s = e.value.c_str();
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(s, &end);
        if (e.value.empty() || end == s || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
            fail(key, e.line, "expected a number, got '" + e.value + "'");
            return std::nullopt;
        }
        return v;
    }

    std::map<std::string, Entry> entries_;
    std::string source_;
    std::set<std::string> used_;
    std::vector<std::string> errors_;
};

std::map<std::string, Entry> tokenize(std::string_view text, const std::string& source,
                                      std::vector<std::string>& errors) {
    std::map<std::string, Entry> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;

        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            errors.push_back(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        std::string key = trim(std::string_view(stripped).substr(0, eq));
        std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty()) {
            errors.push_back(source + ":" + std::to_string(line_no) + ": missing key before '='");
            continue;
        }
        if (auto it = out.find(key); it != out.end()) {
            errors.push_back(source + ":" + std::to_string(line_no) + ": " + key + ": duplicate key (first set on line " +
                             std::to_string(it->second.line) + ")");
            continue;
        }
        out.emplace(std::move(key), Entry{std::move(value), line_no});
    }
    return out;
}

std::optional<EstimatorKind> estimator_kind(const std::string& s) {
    if (s == "rls") return EstimatorKind::Rls;
    if (s == "cf_rls") return EstimatorKind::CfRls;
    if (s == "kalman") return EstimatorKind::Kalman;
    if (s == "vdf_rls") return EstimatorKind::VdfRls;
    return std::nullopt;
}

std::optional<FreqSourceKind> freq_kind(const std::string& s) {
    if (s == "secondary") return FreqSourceKind::SecondaryPll;
    if (s == "primary") return FreqSourceKind::PrimaryPll;
    if (s == "lpf_primary") return FreqSourceKind::LpfOfPrimary;
    return std::nullopt;
}

void apply(Reader& r, ScenarioConfig& c) {
    r.number("sim.dt", c.dt);
    r.number("sim.t_end", c.t_end);
    r.number("sim.estimation_start", c.estimation_start);

    r.number("grid.v_ll_rms", c.grid.v_ll_rms);
    r.number("grid.freq_hz", c.grid.freq_hz);
    r.number("grid.phase0_rad", c.grid.phase0);
    r.number("grid.freq_ramp_hz_per_s", c.grid.freq_ramp_hz_per_s);

    r.number("line.r", c.line.initial.r);
    r.number("line.l", c.line.initial.l);
    bool step_enabled = c.line.step.has_value();
    ImpedanceStepEvent step = c.line.step.value_or(ImpedanceStepEvent{});
    r.boolean("step.enabled", step_enabled);
    r.number("step.t", step.t_step);
    r.number("step.r", step.params_after.r);
    r.number("step.l", step.params_after.l);
    c.line.step = step_enabled ? std::optional<ImpedanceStepEvent>(step) : std::nullopt;

    r.number("inverter.tau_track", c.tau_track);
    r.number("inverter.primary_crossover_hz", c.primary_crossover_hz);
    r.number("inverter.primary_zero_ratio", c.primary_zero_ratio);

    {
        auto t = r.numbers("schedule.t");
        auto p = r.numbers("schedule.p");
        auto q = r.numbers("schedule.q");
        if (t || p || q) {
            if (!(t && p && q)) {
                r.errors().push_back("schedule: schedule.t, schedule.p and schedule.q must be given together");
            } else if (t->size() != p->size() || t->size() != q->size()) {
                r.errors().push_back("schedule: schedule.t, schedule.p and schedule.q must have equal lengths");
            } else {
                c.schedule.entries.clear();
                for (std::size_t k = 0; k < t->size(); ++k) c.schedule.entries.push_back({(*t)[k], (*p)[k], (*q)[k]});
            }
        }
    }

    r.boolean("noise.enabled", c.noise.enabled);
    r.number("noise.sigma_v", c.noise.sigma_v);
    r.number("noise.sigma_i", c.noise.sigma_i);
    r.seed("noise.seed", c.noise.seed);

    if (auto e = r.take("pll.kind")) {
        if (auto k = freq_kind(e->value)) {
            c.freq_source.kind = *k;
        } else {
            r.fail("pll.kind", e->line, "expected secondary, primary or lpf_primary, got '" + e->value + "'");
        }
    }
    r.number("pll.crossover_hz", c.freq_source.crossover_hz);
    r.number("pll.zero_ratio", c.freq_source.zero_ratio);
    r.number("pll.lpf_cutoff_hz", c.freq_source.lpf_cutoff_hz);
    r.number("pll.psi0_rad", c.freq_source.psi0);

    r.number("bpf.lower_hz", c.conditioning.lower_hz);
    r.number("bpf.upper_hz", c.conditioning.upper_hz);
    if (auto e = r.take("regressor.axes")) {
        if (e->value == "d") {
            c.conditioning.axes = RegressorAxes::D;
        } else if (e->value == "dq") {
            c.conditioning.axes = RegressorAxes::Dq;
        } else {
            r.fail("regressor.axes", e->line, "expected d or dq, got '" + e->value + "'");
        }
    }
    if (auto e = r.take("conditioning.filter")) {
        if (e->value == "bpf") {
            c.conditioning.filter = FilterKind::Bpf;
        } else if (e->value == "deriv_lpf") {
            c.conditioning.filter = FilterKind::DerivLpf;
        } else {
            r.fail("conditioning.filter", e->line, "expected bpf or deriv_lpf, got '" + e->value + "'");
        }
    }

    if (auto e = r.take("estimator.kind")) {
        c.estimators.clear();
        for (const std::string& w : split(e->value, ',')) {
            if (auto k = estimator_kind(w)) {
                c.estimators.push_back(default_estimator(*k));
            } else {
                r.fail("estimator.kind", e->line, "unknown estimator '" + w + "'");
            }
        }
    }
    auto for_kind = [&](std::function<bool(const EstimatorSpec&)> pred, std::function<void(EstimatorSpec&)> fn) {
        for (auto& s : c.estimators) {
            if (pred(s)) fn(s);
        }
    };
    auto is = [](EstimatorKind k) { return [k](const EstimatorSpec& s) { return s.kind == k; }; };
    auto any = [](const EstimatorSpec&) { return true; };

    double shared = 0.0;
    if (r.has("estimator.lambda")) {
        r.number("estimator.lambda", shared);
        for_kind([](const EstimatorSpec& s) { return s.kind == EstimatorKind::CfRls || s.kind == EstimatorKind::VdfRls; },
                 [&](EstimatorSpec& s) { s.lambda = shared; });
    }
    for (EstimatorKind k : {EstimatorKind::CfRls, EstimatorKind::VdfRls}) {
        const std::string key = std::string("estimator.") + to_string(k) + ".lambda";
        if (r.has(key)) {
            double v = 0.0;
            r.number(key, v);
            for_kind(is(k), [&](EstimatorSpec& s) { s.lambda = v; });
        }
    }
    if (r.has("estimator.epsilon")) {
        double v = 0.0;
        r.number("estimator.epsilon", v);
        for_kind(is(EstimatorKind::VdfRls), [&](EstimatorSpec& s) { s.epsilon = v; });
    }
    if (r.has("estimator.kalman.s")) {
        double v = 0.0;
        r.number("estimator.kalman.s", v);
        for_kind(is(EstimatorKind::Kalman), [&](EstimatorSpec& s) { s.kalman.s = v; });
    }
    if (auto q = r.numbers("estimator.kalman.q_diag")) {
        if (q->size() == 1 || q->size() == 2) {
            const Mat2 qm = Mat2::diag(q->front(), q->back());
            for_kind(is(EstimatorKind::Kalman), [&](EstimatorSpec& s) { s.kalman.q = qm; });
        } else {
            r.errors().push_back("estimator.kalman.q_diag: expected one or two values");
        }
    }
    if (auto th = r.numbers("estimator.theta0")) {
        if (th->size() == 2) {
            for_kind(any, [&](EstimatorSpec& s) { s.theta0 = {(*th)[0], (*th)[1]}; });
        } else {
            r.errors().push_back("estimator.theta0: expected two values [R, w0 L]");
        }
    }
    if (r.has("estimator.r0_scale")) {
        double v = 0.0;
        r.number("estimator.r0_scale", v);
        for_kind(any, [&](EstimatorSpec& s) { s.r0_scale = v; });
    }

    if (auto e = r.take("metrics.windows")) {
        c.windows.clear();
        for (const std::string& item : split(e->value, ',')) {
            const auto parts = split(item, ':');
            char* end0 = nullptr;
            char* end1 = nullptr;
            if (parts.size() != 3) {
                r.fail("metrics.windows", e->line, "expected start:end:label, got '" + item + "'");
                continue;
            }
            const double a = std::strtod(parts[0].c_str(), &end0);
            const double b = std::strtod(parts[1].c_str(), &end1);
            if (*end0 != '\0' || *end1 != '\0' || parts[0].empty() || parts[1].empty() || parts[2].empty()) {
                r.fail("metrics.windows", e->line, "expected start:end:label, got '" + item + "'");
                continue;
            }
            c.windows.push_back({a, b, parts[2]});
        }
    }

    r.text("output.dir", c.output.dir);
    r.boolean("output.emit_truth", c.output.emit_truth);
    r.boolean("output.emit_measurements", c.output.emit_measurements);
    r.count("output.stride", c.output.stride);

    r.reject_unknown();
}

}  // namespace

double GridConfig::v_phase_peak() const { return v_ll_rms * std::sqrt(2.0 / 3.0); }

GridSource GridConfig::source() const { return {v_phase_peak(), freq_hz, phase0, freq_ramp_hz_per_s}; }

std::size_t ScenarioConfig::step_count() const {
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

EstimatorSpec default_estimator(EstimatorKind kind) {
    EstimatorSpec s;
    s.name = to_string(kind);
    s.kind = kind;
    s.theta0 = {0.0, 0.0};
    s.r0_scale = 1e-3;
    switch (kind) {
        case EstimatorKind::Rls: s.lambda = 1.0; break;
        case EstimatorKind::CfRls: s.lambda = 0.99995; break;
        case EstimatorKind::VdfRls:
            s.lambda = 0.995;
            s.epsilon = 0.2;
            break;
        case EstimatorKind::Kalman:
            s.lambda = 1.0;
            s.kalman.s = 0.995;
            s.kalman.q = Mat2::scaled_identity(1e-5);
            break;
    }
    return s;
}

ScenarioConfig default_config() {
    ScenarioConfig c;
    c.line.initial = {0.2, 1.0e-3};
    c.line.step = ImpedanceStepEvent{10.0, {0.4, 2.0e-3}};

    // setpoints change every 2 s up to t = 20 s, then hold
    const double p_kw[] = {2.0, 4.0, 2.5, 5.0, 3.0, 4.5, 2.0, 4.0, 3.0, 5.0, 3.5};
    const double q_kvar[] = {0.0, 1.0, -1.0, 0.5, 1.5, -0.5, 1.0, -1.5, 0.0, 1.0, 0.5};
    for (int k = 0; k < 11; ++k) {
        c.schedule.entries.push_back({2.0 * k, p_kw[k] * 1e3, q_kvar[k] * 1e3});
    }
    c.tau_track = 0.002;

    c.noise.enabled = true;
    c.noise.sigma_v = 0.2;
    c.noise.sigma_i = 0.0015;
    c.noise.seed = 1;

    c.estimators = {default_estimator(EstimatorKind::VdfRls), default_estimator(EstimatorKind::Kalman),
                    default_estimator(EstimatorKind::Rls), default_estimator(EstimatorKind::CfRls)};
    c.windows = {{15.0, 20.0, "with_excitation"}, {35.0, 40.0, "without_excitation"}};
    return c;
}

std::vector<std::string> validate(const ScenarioConfig& c, std::vector<std::string>* warnings) {
    std::vector<std::string> bad;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };
    require(c.dt > 0.0, "sim.dt: must be positive");
    require(c.estimation_start >= 0.0, "sim.estimation_start: must be non-negative");
    require(c.estimation_start < c.t_end, "sim.estimation_start: must be before sim.t_end");

    require(c.grid.v_ll_rms > 0.0, "grid.v_ll_rms: must be positive");
    require(c.grid.freq_hz >= 55.0 && c.grid.freq_hz <= 65.0, "grid.freq_hz: must lie in [55, 65] Hz");

    require(c.line.initial.r > 0.0, "line.r: must be positive");
    require(c.line.initial.l > 0.0, "line.l: must be positive");
    if (c.line.step) {
        require(c.line.step->t_step >= 0.0, "step.t: must be non-negative");
        require(c.line.step->params_after.r > 0.0, "step.r: must be positive");
        require(c.line.step->params_after.l > 0.0, "step.l: must be positive");
    }

    require(c.tau_track > 0.0, "inverter.tau_track: must be positive");
    require(c.primary_crossover_hz > 0.0, "inverter.primary_crossover_hz: must be positive");
    require(c.primary_zero_ratio > 1.0, "inverter.primary_zero_ratio: must exceed 1");
    for (const auto& v : c.schedule.violations()) bad.push_back(v);

    require(c.noise.sigma_v >= 0.0, "noise.sigma_v: must be non-negative");
    require(c.noise.sigma_i >= 0.0, "noise.sigma_i: must be non-negative");

    require(c.freq_source.crossover_hz > 0.0, "pll.crossover_hz: must be positive");
    require(c.freq_source.zero_ratio > 1.0, "pll.zero_ratio: must exceed 1");
    require(c.freq_source.lpf_cutoff_hz > 0.0, "pll.lpf_cutoff_hz: must be positive");

    require(c.conditioning.lower_hz > 0.0, "bpf.lower_hz: must be positive");
    require(c.conditioning.upper_hz > c.conditioning.lower_hz, "bpf.lower_hz: must be below bpf.upper_hz");

    require(!c.estimators.empty(), "estimator.kind: at least one estimator is required");
    std::set<std::string> names;
    for (const EstimatorSpec& s : c.estimators) {
        require(names.insert(s.name).second, "estimator.kind: duplicate estimator '" + s.name + "'");
        require(s.r0_scale > 0.0, "estimator.r0_scale: must be positive");
        switch (s.kind) {
            case EstimatorKind::Rls: break;
            case EstimatorKind::CfRls:
                require(s.lambda > 0.0 && s.lambda <= 1.0,
                        "estimator.lambda: cf_rls forgetting factor " + num(s.lambda) + " outside (0, 1]");
                break;
            case EstimatorKind::VdfRls:
                require(s.lambda > 0.0 && s.lambda < 1.0,
                        "estimator.lambda: vdf_rls forgetting factor " + num(s.lambda) + " outside (0, 1)");
                require(s.epsilon >= 0.0, "estimator.epsilon: must be non-negative");
                break;
            case EstimatorKind::Kalman:
                require(s.kalman.s > 0.0, "estimator.kalman.s: must be positive");
                require(s.kalman.q.a >= 0.0 && s.kalman.q.d >= 0.0 && s.kalman.q.det() >= 0.0,
                        "estimator.kalman.q_diag: must be positive semidefinite");
                break;
        }
    }

    require(!c.windows.empty(), "metrics.windows: at least one window is required");
    std::set<std::string> labels;
    for (const RmspeWindow& w : c.windows) {
        require(w.t_end > w.t_start, "metrics.windows: window '" + w.label + "' must have end > start");
        require(w.t_start >= 0.0 && w.t_end <= c.t_end,
                "metrics.windows: window '" + w.label + "' must lie within [0, sim.t_end]");
        require(w.label.find_first_of(",\"") == std::string::npos,
                "metrics.windows: label '" + w.label + "' must not contain commas or quotes");
        require(labels.insert(w.label).second, "metrics.windows: duplicate label '" + w.label + "'");
    }
    require(c.output.stride >= 1, "output.stride: must be at least 1");

    if (warnings) {
        double frame_bw = c.freq_source.crossover_hz;
        if (c.freq_source.kind == FreqSourceKind::PrimaryPll) frame_bw = c.primary_crossover_hz;
        if (c.freq_source.kind == FreqSourceKind::LpfOfPrimary) frame_bw = c.freq_source.lpf_cutoff_hz;
        if (c.conditioning.lower_hz < 10.0 * frame_bw) {
            warnings->push_back("bpf.lower_hz: " + num(c.conditioning.lower_hz) +
                                " Hz is below 10x the estimation-frame bandwidth (" + num(frame_bw) + " Hz)");
        }
        if (c.dt > 0.0 && c.conditioning.upper_hz > 0.1 / c.dt) {
            warnings->push_back("bpf.upper_hz: " + num(c.conditioning.upper_hz) +
                                " Hz is above a tenth of the sampling rate");
        }
    }
    return bad;
}

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
    std::vector<std::string> errors;
    auto entries = tokenize(text, source, errors);
    Reader reader(std::move(entries), source);
    ScenarioConfig cfg = default_config();
    apply(reader, cfg);
    for (auto& e : reader.errors()) errors.push_back(std::move(e));
    if (!errors.empty()) throw ConfigError(std::move(errors));

    std::vector<std::string> warnings;
    auto bad = validate(cfg, &warnings);
    if (!bad.empty()) throw ConfigError(std::move(bad));
    cfg.warnings = std::move(warnings);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string to_text(const ScenarioConfig& c) {
    std::ostringstream o;
    auto kv = [&o](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
    kv("sim.dt", num(c.dt));
    kv("sim.t_end", num(c.t_end));
    kv("sim.estimation_start", num(c.estimation_start));
    kv("grid.v_ll_rms", num(c.grid.v_ll_rms));
    kv("grid.freq_hz", num(c.grid.freq_hz));
    kv("grid.phase0_rad", num(c.grid.phase0));
    kv("grid.freq_ramp_hz_per_s", num(c.grid.freq_ramp_hz_per_s));
    kv("line.r", num(c.line.initial.r));
    kv("line.l", num(c.line.initial.l));
    kv("step.enabled", c.line.step ? "true" : "false");
    if (c.line.step) {
        kv("step.t", num(c.line.step->t_step));
        kv("step.r", num(c.line.step->params_after.r));
        kv("step.l", num(c.line.step->params_after.l));
    }
    kv("inverter.tau_track", num(c.tau_track));
    kv("inverter.primary_crossover_hz", num(c.primary_crossover_hz));
    kv("inverter.primary_zero_ratio", num(c.primary_zero_ratio));
    std::vector<double> st, sp, sq;
    for (const auto& e : c.schedule.entries) {
        st.push_back(e.t_start);
        sp.push_back(e.p);
        sq.push_back(e.q);
    }
    kv("schedule.t", num_list(st));
    kv("schedule.p", num_list(sp));
    kv("schedule.q", num_list(sq));
    kv("noise.enabled", c.noise.enabled ? "true" : "false");
    kv("noise.sigma_v", num(c.noise.sigma_v));
    kv("noise.sigma_i", num(c.noise.sigma_i));
    kv("noise.seed", std::to_string(c.noise.seed));
    kv("pll.kind", to_string(c.freq_source.kind));
    kv("pll.crossover_hz", num(c.freq_source.crossover_hz));
    kv("pll.zero_ratio", num(c.freq_source.zero_ratio));
    kv("pll.lpf_cutoff_hz", num(c.freq_source.lpf_cutoff_hz));
    kv("pll.psi0_rad", num(c.freq_source.psi0));
    kv("bpf.lower_hz", num(c.conditioning.lower_hz));
    kv("bpf.upper_hz", num(c.conditioning.upper_hz));
    kv("regressor.axes", to_string(c.conditioning.axes));
    kv("conditioning.filter", to_string(c.conditioning.filter));

    std::string kinds;
    for (std::size_t k = 0; k < c.estimators.size(); ++k) {
        kinds += (k ? ", " : "") + std::string(to_string(c.estimators[k].kind));
    }
    kv("estimator.kind", kinds);
    for (const EstimatorSpec& s : c.estimators) {
        const std::string p = std::string("estimator.") + to_string(s.kind);
        if (s.kind == EstimatorKind::CfRls || s.kind == EstimatorKind::VdfRls) kv(p + ".lambda", num(s.lambda));
        if (s.kind == EstimatorKind::VdfRls) kv("estimator.epsilon", num(s.epsilon));
        if (s.kind == EstimatorKind::Kalman) {
            kv("estimator.kalman.s", num(s.kalman.s));
            kv("estimator.kalman.q_diag", num(s.kalman.q.a) + ", " + num(s.kalman.q.d));
        }
    }
    if (!c.estimators.empty()) {
        const EstimatorSpec& s = c.estimators.front();
        kv("estimator.theta0", num(s.theta0.x) + ", " + num(s.theta0.y));
        kv("estimator.r0_scale", num(s.r0_scale));
    }

    std::string windows;
    for (std::size_t k = 0; k < c.windows.size(); ++k) {
        windows += (k ? ", " : "") + num(c.windows[k].t_start) + ":" + num(c.windows[k].t_end) + ":" + c.windows[k].label;
    }
    kv("metrics.windows", windows);
    kv("output.dir", c.output.dir);
    kv("output.emit_truth", c.output.emit_truth ? "true" : "false");
    kv("output.emit_measurements", c.output.emit_measurements ? "true" : "false");
    kv("output.stride", std::to_string(c.output.stride));
    return o.str();
}

std::string config_hash(const ScenarioConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_text(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace lineid
