#include "lineid/scenario.hpp"

#include "lineid/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <future>
#include <optional>

namespace lineid {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, double v) {
    unsigned char bytes[sizeof v];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
        h ^= b;
        h *= kFnvPrime;
    }
}

std::string hex16(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void append(std::string& out, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.9g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace

const char* library_version() { return "1.0.0"; }

SimulationResult simulate(const ScenarioConfig& cfg, const StepObserver& observer) {
    const GridSource grid = cfg.grid.source();
    const double v_nom = cfg.grid.v_phase_peak();
    const PllDesign primary = design_pi(cfg.primary_crossover_hz, v_nom, cfg.primary_zero_ratio);
    const double dt = cfg.dt;
    const std::size_t n_steps = cfg.step_count();

    InverterState inv = make_inverter_state(grid, cfg.tau_track);
    std::optional<NoiseSource> noise;
    if (cfg.noise.enabled) noise.emplace(cfg.noise.seed);
    NoiseSource* noise_ptr = noise ? &*noise : nullptr;

    FrameTracker tracker(cfg.freq_source, v_nom, inv.pll.frame());
    RegressorBuilder builder(cfg.conditioning, dt);

    std::vector<Estimator> estimators;
    estimators.reserve(cfg.estimators.size());
    for (const EstimatorSpec& spec : cfg.estimators) estimators.emplace_back(spec);

    std::vector<std::vector<RmspeAccumulator>> acc(estimators.size());
    for (auto& per_est : acc) {
        for (const RmspeWindow& w : cfg.windows) per_est.emplace_back(w);
    }

    const bool dq = cfg.conditioning.axes == RegressorAxes::Dq;
    std::uint64_t hash = kFnvOffset;
    double last_good = 0.0;

    for (std::size_t n = 0; n < n_steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const LineParams line = cfg.line.at(t);
        const PowerSetpoint sp = schedule_lookup(cfg.schedule, t);

        PlantStep ps = plant_step(inv, grid, line, sp, primary, dt, noise_ptr, cfg.noise.sigma_v, cfg.noise.sigma_i);
        ps.measured.t = t;
        fnv_mix(hash, ps.measured.v_c_alpha);
        fnv_mix(hash, ps.measured.v_c_beta);
        fnv_mix(hash, ps.measured.i_alpha);
        fnv_mix(hash, ps.measured.i_beta);

        const FrameAngle frame = tracker.current();
        const DqSample s = to_dq(ps.measured.stationary(), frame);
        const RegressorBuilder::Output reg = builder.push(s);

        const bool estimating = t >= cfg.estimation_start;
        if (estimating) {
            const Vec2 truth = line.theta();
            for (std::size_t k = 0; k < estimators.size(); ++k) {
                if (dq) {
                    estimators[k].update(reg.dq);
                } else {
                    estimators[k].update(reg.d);
                }
                const Vec2 th = estimators[k].theta();
                if (!finite(th)) {
                    throw NumericalFault("estimator '" + estimators[k].spec().name + "' produced a non-finite estimate",
                                         last_good);
                }
                for (RmspeAccumulator& a : acc[k]) a.add(t, th, truth);
            }
        }

        if (observer) observer({t, line, &ps.measured, ps.v_grid, frame, &reg.d, estimating, estimators});

        tracker.advance(ps.measured.v(), ps.state.pll.frame(), dt);
        inv = ps.state;
        last_good = t;
    }

    SimulationResult result;
    result.measurement_hash = hex16(hash);
    result.undervoltage_events = inv.undervoltage_events;
    for (std::size_t k = 0; k < estimators.size(); ++k) {
        ScoredRun run{estimators[k].spec().name, {}};
        for (const RmspeAccumulator& a : acc[k]) {
            run.scores.push_back({a.window(), a.percent(0), a.percent(1), a.count()});
        }
        result.scored.push_back(std::move(run));
        result.final_theta.push_back(estimators[k].theta());
    }
    return result;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
    const std::filesystem::path dir = cfg.output.dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    std::string ts = "t,r_true,l_true";
    for (const auto& e : cfg.estimators) ts += "," + e.name + "_r_hat," + e.name + "_l_hat";
    for (const auto& e : cfg.estimators) ts += "," + e.name + "_sigma_min_info," + e.name + "_sigma_max_info";
    ts += "\n";

    const bool want_meas = cfg.output.emit_measurements || cfg.output.emit_truth;
    std::string meas;
    if (want_meas) {
        meas = "t,v_c_alpha,v_c_beta,i_alpha,i_beta";
        if (cfg.output.emit_truth) meas += ",r_true,l_true,v_g_alpha,v_g_beta";
        meas += "\n";
    }

    const std::size_t stride = cfg.output.stride;
    std::size_t n = 0;
    auto observer = [&](const StepView& v) {
        const bool keep = n++ % stride == 0;
        if (!keep) return;
        append(ts, v.t);
        ts += ',';
        append(ts, v.truth.r);
        ts += ',';
        append(ts, v.truth.l);
        for (const Estimator& e : v.estimators) {
            const LineParams p = LineParams::from_theta(e.theta());
            ts += ',';
            append(ts, p.r);
            ts += ',';
            append(ts, p.l);
        }
        for (const Estimator& e : v.estimators) {
            const auto [lo, hi] = sym_singular_range(e.information());
            ts += ',';
            append(ts, lo);
            ts += ',';
            append(ts, hi);
        }
        ts += '\n';

        if (want_meas) {
            const MeasurementSample& m = *v.measured;
            append(meas, v.t);
            for (double x : {m.v_c_alpha, m.v_c_beta, m.i_alpha, m.i_beta}) {
                meas += ',';
                append(meas, x);
            }
            if (cfg.output.emit_truth) {
                for (double x : {v.truth.r, v.truth.l, v.v_grid.x, v.v_grid.y}) {
                    meas += ',';
                    append(meas, x);
                }
            }
            meas += '\n';
        }
    };

    const SimulationResult sim = simulate(cfg, observer);

    RunArtifacts art;
    art.config_hash = config_hash(cfg);
    art.measurement_hash = sim.measurement_hash;
    art.report = build_report(sim.scored);
    art.timeseries_csv = dir / "timeseries.csv";
    art.report_csv = dir / "report.csv";
    art.meta_json = dir / "run_meta.json";

    write_atomic(art.timeseries_csv, ts);
    write_atomic(art.report_csv, art.report.to_csv());
    if (want_meas) {
        art.measurements_csv = dir / "measurements.csv";
        write_atomic(art.measurements_csv, meas);
    }

    nlohmann::ordered_json meta;
    meta["version"] = library_version();
    meta["config_hash"] = art.config_hash;
    meta["seed"] = cfg.noise.seed;
    meta["noise_enabled"] = cfg.noise.enabled;
    meta["steps"] = cfg.step_count();
    meta["measurement_hash"] = sim.measurement_hash;
    meta["undervoltage_events"] = sim.undervoltage_events;
    meta["warnings"] = cfg.warnings;
    meta["files"] = {art.timeseries_csv.filename().string(), art.report_csv.filename().string()};
    if (want_meas) meta["files"].push_back(art.measurements_csv.filename().string());
    write_atomic(art.meta_json, meta.dump(2) + "\n");
    return art;
}

const char* to_string(AblationSuite s) {
    switch (s) {
        case AblationSuite::Algorithms: return "algorithms";
        case AblationSuite::Axes: return "axes";
        case AblationSuite::FreqSource: return "freq_source";
        case AblationSuite::Filters: return "filters";
    }
    return "?";
}

AblationSuite parse_suite(const std::string& name) {
    for (AblationSuite s : {AblationSuite::Algorithms, AblationSuite::Axes, AblationSuite::FreqSource,
                            AblationSuite::Filters}) {
        if (name == to_string(s)) return s;
    }
    throw ConfigError({"--suite: unknown suite '" + name + "' (expected algorithms, axes, freq_source or filters)"});
}

std::vector<AblationVariant> ablation_variants(const ScenarioConfig& base, AblationSuite suite) {
    ScenarioConfig single = base;
    {
        // preconditioning comparisons use the directional-forgetting estimator alone
        std::optional<EstimatorSpec> vdf;
        for (const auto& e : base.estimators) {
            if (e.kind == EstimatorKind::VdfRls) vdf = e;
        }
        single.estimators = {vdf.value_or(default_estimator(EstimatorKind::VdfRls))};
    }

    std::vector<AblationVariant> out;
    switch (suite) {
        case AblationSuite::Algorithms: {
            ScenarioConfig c = base;
            c.estimators.clear();
            for (EstimatorKind k :
                 {EstimatorKind::VdfRls, EstimatorKind::Kalman, EstimatorKind::Rls, EstimatorKind::CfRls}) {
                std::optional<EstimatorSpec> found;
                for (const auto& e : base.estimators) {
                    if (e.kind == k) found = e;
                }
                c.estimators.push_back(found.value_or(default_estimator(k)));
            }
            out.push_back({"algorithms", c});
            break;
        }
        case AblationSuite::Axes: {
            ScenarioConfig d = single;
            d.conditioning.axes = RegressorAxes::D;
            ScenarioConfig both = single;
            both.conditioning.axes = RegressorAxes::Dq;
            out.push_back({"d_only", d});
            out.push_back({"dq_both", both});
            break;
        }
        case AblationSuite::FreqSource: {
            ScenarioConfig sec = single;
            sec.freq_source.kind = FreqSourceKind::SecondaryPll;
            ScenarioConfig pri = single;
            pri.freq_source.kind = FreqSourceKind::PrimaryPll;
            ScenarioConfig lpf0 = single;
            lpf0.freq_source.kind = FreqSourceKind::LpfOfPrimary;
            lpf0.freq_source.psi0 = 0.0;
            ScenarioConfig lpf30 = lpf0;
            lpf30.freq_source.psi0 = -kPi / 6.0;
            out.push_back({"secondary_pll", sec});
            out.push_back({"primary_pll", pri});
            out.push_back({"lpf_primary_psi0_0", lpf0});
            out.push_back({"lpf_primary_psi0_minus_pi_6", lpf30});
            break;
        }
        case AblationSuite::Filters: {
            ScenarioConfig bpf = single;
            bpf.conditioning.filter = FilterKind::Bpf;
            ScenarioConfig dl = single;
            dl.conditioning.filter = FilterKind::DerivLpf;
            out.push_back({"bpf", bpf});
            out.push_back({"deriv_lpf", dl});
            break;
        }
    }
    return out;
}

AblationResult run_ablation_suite(const ScenarioConfig& base, AblationSuite suite) {
    const std::vector<AblationVariant> variants = ablation_variants(base, suite);

    std::vector<std::future<SimulationResult>> jobs;
    jobs.reserve(variants.size());
    for (const AblationVariant& v : variants) {
        jobs.push_back(std::async(std::launch::async, [&v] { return simulate(v.cfg); }));
    }

    std::vector<ScoredRun> runs;
    AblationResult result;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        SimulationResult sim = jobs[i].get();
        for (ScoredRun& r : sim.scored) {
            if (suite != AblationSuite::Algorithms) r.estimator = variants[i].label;
            runs.push_back(std::move(r));
            result.measurement_hashes.push_back(sim.measurement_hash);
        }
    }
    result.report = build_report(runs);
    return result;
}

}  // namespace lineid
