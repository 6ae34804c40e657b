#include "lineid/errors.hpp"
#include "lineid/scenario.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace lineid;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt2(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

std::vector<RegressorSample> random_samples(std::size_t n, std::uint64_t seed, Vec2 theta) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<RegressorSample> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k].u = {g(rng), g(rng)};
        out[k].y = dot(out[k].u, theta) + 0.1 * g(rng);
        out[k].t = static_cast<double>(k);
    }
    return out;
}

// ---------------------------------------------------------------------------

Outcome batch_oracle() {
    Outcome o;
    const auto xs = random_samples(200, 2024, {0.35, 0.62});
    for (double lambda : {1.0, 0.99}) {
        EstimatorState s = make_rls_state({}, 1e-8);
        for (const auto& x : xs) s = cf_rls_update(s, x, {lambda});
        const Vec2 ref = batch_ls(xs, lambda);

        Eigen::MatrixXd a(xs.size(), 2);
        Eigen::VectorXd b(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double w = std::sqrt(std::pow(lambda, static_cast<double>(xs.size() - 1 - k)));
            a(k, 0) = w * xs[k].u.x;
            a(k, 1) = w * xs[k].u.y;
            b(k) = w * xs[k].y;
        }
        const Eigen::Vector2d qr = a.colPivHouseholderQr().solve(b);

        const double e = std::max(rel_err(s.theta.x, ref.x), rel_err(s.theta.y, ref.y));
        const double e_qr = std::max(rel_err(ref.x, qr(0)), rel_err(ref.y, qr(1)));
        o.check(e < 1e-8, fmt("lambda=%g recursive vs batch", lambda));
        o.check(e_qr < 1e-8, fmt("lambda=%g batch vs QR", lambda));
        o.note(fmt2("lambda=%g rel err %.2e", lambda, e));
    }
    return o;
}

Outcome kalman_cf_identity() {
    Outcome o;
    const double lambda = 0.995;
    const auto xs = random_samples(500, 77, {0.2, 0.45});
    EstimatorState k = make_kalman_state({}, 1e-3);
    EstimatorState c = make_rls_state({}, 1e-3);
    double worst = 0.0;
    for (const auto& x : xs) {
        const Mat2 q = cf_equivalent_process_noise(k.info, x.u, lambda);
        k = kalman_update(k, x, {lambda, q});
        c = cf_rls_update(c, x, {lambda});
        worst = std::max({worst, rel_err(k.theta.x, c.theta.x), rel_err(k.theta.y, c.theta.y)});
    }
    o.check(worst < 1e-8, "trajectories diverge");
    o.note(fmt("worst rel err %.2e", worst));
    return o;
}

Outcome no_excitation_stability() {
    Outcome o;
    constexpr int kSteps = 1000000;
    const Mat2 r0{2.0, 0.5, 0.5, 1.0};
    const RegressorSample zero{};

    EstimatorState vdf{{0.1, 0.2}, r0, 0, 0};
    EstimatorState cf{{0.1, 0.2}, r0, 0, 0};
    const KalmanParams kp{0.995, Mat2::scaled_identity(1e-5)};
    EstimatorState kal{{0.1, 0.2}, inverse(r0), 0, 0};
    const CfRlsParams cfp{0.99995};
    const VdfParams vp{0.995, 0.2};
    for (int n = 0; n < kSteps; ++n) {
        vdf = vdf_rls_update(vdf, zero, vp);
        cf = cf_rls_update(cf, zero, cfp);
        kal = kalman_update(kal, zero, kp);
    }

    const Mat2 dv = vdf.info - r0;
    const double vdf_dev = std::max({std::abs(dv.a), std::abs(dv.b), std::abs(dv.c), std::abs(dv.d)});
    o.check(vdf_dev <= 1e-12, "VDF information moved");
    o.check(vdf.theta == Vec2{0.1, 0.2}, "VDF estimate moved");

    const double want = std::pow(cfp.lambda, kSteps) * sym_singular_range(r0)[0];
    const double cf_err = rel_err(sym_singular_range(cf.info)[0], want);
    o.check(cf_err < 1e-9, "CF-RLS sigma_min off the geometric law");

    const Mat2 p_want = inverse(r0) + static_cast<double>(kSteps) * kp.q;
    const Mat2 dp = kal.info - p_want;
    const double kal_err =
        std::max({std::abs(dp.a), std::abs(dp.b), std::abs(dp.c), std::abs(dp.d)}) / std::abs(p_want.a);
    o.check(kal_err < 1e-9, "Kalman covariance off P0 + K Q");

    o.note(fmt("VDF max dev %.1e", vdf_dev));
    o.note(fmt("CF sigma_min rel err %.1e", cf_err));
    o.note(fmt("Kalman rel err %.1e", kal_err));
    return o;
}

Outcome estimator_orderings() {
    Outcome o;
    const SimulationResult sim = simulate(default_config());
    const RmspeReport r = build_report(sim.scored);
    const std::string w = "without_excitation";
    const RmspeRow& v = r.at("vdf_rls", w);
    const RmspeRow& k = r.at("kalman", w);
    const RmspeRow& c = r.at("cf_rls", w);
    const RmspeRow& l = r.at("rls", w);
    const RmspeRow& ve = r.at("vdf_rls", "with_excitation");

    o.check(v.r_pct < k.r_pct && k.r_pct < c.r_pct, "R ordering vdf < kalman < cf");
    o.check(v.l_pct < k.l_pct && k.l_pct < c.l_pct, "L ordering vdf < kalman < cf");
    o.check(c.r_pct > 10.0 * v.r_pct, "cf R > 10x vdf R");
    o.check(c.l_pct > 10.0 * v.l_pct, "cf L > 10x vdf L");
    o.check(l.r_pct > 20.0, "rls R > 20%");
    o.check(ve.r_pct < 5.0, "vdf R < 5% with excitation");
    o.check(ve.l_pct < 3.0, "vdf L < 3% with excitation");

    o.note(fmt2("[35,40) R%%: vdf %.2f kalman %.2f", v.r_pct, k.r_pct) + fmt2(" cf %.2f rls %.2f", c.r_pct, l.r_pct));
    o.note(fmt2("L%%: vdf %.2f kalman %.2f", v.l_pct, k.l_pct) + fmt(" cf %.2f", c.l_pct));
    o.note(fmt2("[15,20) vdf %.2f / %.2f", ve.r_pct, ve.l_pct));
    return o;
}

Outcome preconditioning_orderings() {
    Outcome o;
    const ScenarioConfig base = default_config();
    const std::string w = "with_excitation";
    auto ratio = [&](const RmspeReport& r, const char* worse, const char* better, bool l_axis) {
        const RmspeRow& a = r.at(worse, w);
        const RmspeRow& b = r.at(better, w);
        return l_axis ? a.l_pct / b.l_pct : a.r_pct / b.r_pct;
    };
    struct Pair {
        AblationSuite suite;
        const char* worse;
        const char* better;
        bool l_axis;
        const char* label;
    };
    const Pair pairs[] = {
        {AblationSuite::Axes, "dq_both", "d_only", false, "dq/d R"},
        {AblationSuite::FreqSource, "primary_pll", "secondary_pll", false, "primary/secondary R"},
        {AblationSuite::FreqSource, "lpf_primary_psi0_minus_pi_6", "lpf_primary_psi0_0", false, "lpf(-pi/6)/lpf(0) R"},
        {AblationSuite::Filters, "deriv_lpf", "bpf", true, "deriv_lpf/bpf L"},
    };
    std::optional<AblationSuite> have;
    RmspeReport rep;
    for (const Pair& p : pairs) {
        if (have != p.suite) {
            rep = run_ablation_suite(base, p.suite).report;
            have = p.suite;
        }
        const double x = ratio(rep, p.worse, p.better, p.l_axis);
        o.check(x >= 3.0, std::string(p.label) + " >= 3x");
        o.note(std::string(p.label) + fmt(" %.2fx", x));
    }
    return o;
}

Outcome conditioning_oracle() {
    Outcome o;
    constexpr double dt = 5e-5;
    const double r = 0.3, l = 1.5e-3, omega = 376.9;
    const Vec2 theta{r, kOmegaNominal * l};
    const double f[] = {13.0, 27.0, 41.0, 66.0};
    const double a_d[] = {3.0, 2.0, 1.5, 1.0};
    const double a_q[] = {1.0, 2.5, 0.5, 1.2};
    std::vector<DqSample> stream;
    for (int k = 0; k < 40000; ++k) {
        const double t = k * dt;
        double id = 20.0, iq = -3.0, did = 0.0, diq = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double wj = kTwoPi * f[j];
            id += a_d[j] * std::sin(wj * t + j);
            did += a_d[j] * wj * std::cos(wj * t + j);
            iq += a_q[j] * std::cos(wj * t + 0.5 * j);
            diq -= a_q[j] * wj * std::sin(wj * t + 0.5 * j);
        }
        DqSample s;
        s.i_d = id;
        s.i_q = iq;
        s.v_d = r * id + l * did - omega * l * iq + 391.0;
        s.v_q = r * iq + l * diq + omega * l * id - 2.0;
        s.omega = omega;
        s.t = t;
        stream.push_back(s);
    }
    const auto reg = build_regressor(stream, ConditioningConfig{}, dt);
    const std::vector<RegressorSample> kept(reg.begin() + 4000, reg.end());
    double e2 = 0.0, y2 = 0.0;
    for (const auto& x : kept) {
        const double e = x.y - dot(x.u, theta);
        e2 += e * e;
        y2 += x.y * x.y;
    }
    const double resid = std::sqrt(e2 / y2);
    const Vec2 est = batch_ls(kept, 1.0);
    const double err = std::max(rel_err(est.x, theta.x), rel_err(est.y, theta.y));
    o.check(resid < 0.01, "residual RMS >= 1% of y");
    o.check(err < 0.01, "batch estimate off by >= 1%");
    o.note(fmt("residual %.3f%% of y", 100.0 * resid));
    o.note(fmt("theta err %.3f%%", 100.0 * err));
    return o;
}

Outcome frequency_domain() {
    Outcome o;
    const BpfDesign d = design_bpf(kTwoPi * 100.0, kTwoPi * 10.0, 5e-5);
    const double dc = std::abs(d.response(0.0));
    const double dc_z = std::abs(d.bpf_z.response(0.0, d.dt));
    const double mid = std::abs(d.response(kTwoPi * std::sqrt(10.0 * 100.0)));
    o.check(dc == 0.0 && dc_z < 1e-12, "BPF DC gain not zero");
    o.check(mid >= 0.9 && mid <= 1.0, "mid-band gain outside [0.9, 1]");
    o.note(fmt("mid-band gain %.4f", mid));

    const double v = default_config().grid.v_phase_peak();
    for (double fc : {1.0, 20.0}) {
        const PllDesign p = design_pi(fc, v, fc == 1.0 ? 100.0 : 10.0);
        const double got = pll_realized_crossover_hz(p);
        o.check(std::abs(got - fc) <= 0.05 * fc, fmt("crossover of %g Hz PLL", fc));
        o.note(fmt2("%g Hz PLL crosses at %.4f Hz", fc, got));
    }
    const PllDesign sec = design_pi(1.0, v, 100.0);
    const double lo = std::abs(pll_grid_phase_transfer(sec, {0.0, kTwoPi * 0.1}));
    const double hi = std::abs(pll_grid_phase_transfer(sec, {0.0, kTwoPi * 10.0}));
    const double db = 20.0 * std::log10(lo / hi);
    o.check(db >= 20.0, "(1-Q)/s shaping below 20 dB");
    o.note(fmt("(1-Q)/s 0.1 Hz over 10 Hz: %.3f dB", db));
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    const auto root = std::filesystem::temp_directory_path() / "lineid_acceptance";
    std::filesystem::remove_all(root);
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(LINEID_FIXTURE_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        ScenarioConfig cfg = load_config(entry.path());
        cfg.output.emit_truth = true;
        std::vector<RunArtifacts> runs;
        for (const char* tag : {"a", "b"}) {
            cfg.output.dir = (root / entry.path().stem() / tag).string();
            runs.push_back(run_scenario(cfg));
        }
        for (auto member : {&RunArtifacts::timeseries_csv, &RunArtifacts::report_csv, &RunArtifacts::measurements_csv}) {
            const std::string a = slurp(runs[0].*member);
            o.check(!a.empty() && a == slurp(runs[1].*member),
                    entry.path().filename().string() + " " + (runs[0].*member).filename().string());
            ++files;
        }
    }
    o.check(files > 0, "no fixtures found");
    o.note(fmt("%g CSV pairs identical", static_cast<double>(o.pass ? files : 0)));
    std::filesystem::remove_all(root);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "batch-oracle equivalence", 1.0, batch_oracle},
        {2, "kalman/cf-rls identity", 1.0, kalman_cf_identity},
        {3, "no-excitation stability", 5.0, no_excitation_stability},
        {4, "estimator orderings", 60.0, estimator_orderings},
        {5, "preconditioning orderings", 600.0, preconditioning_orderings},
        {6, "conditioning oracle", 5.0, conditioning_oracle},
        {7, "filter/pll frequency checks", 1.0, frequency_domain},
        {8, "determinism", 600.0, determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.check(secs < c.budget_s, fmt("runtime budget %g s", c.budget_s));
        std::printf("%s %d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
