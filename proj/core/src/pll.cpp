#include "lineid/pll.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lineid {

PllDesign design_pi(double crossover_hz, double v_nominal, double zero_ratio) {
    if (!(crossover_hz > 0.0)) throw std::invalid_argument("design_pi: crossover_hz must be positive");
    if (!(v_nominal > 0.0)) throw std::invalid_argument("design_pi: v_nominal must be positive");
    if (!(zero_ratio > 1.0)) throw std::invalid_argument("design_pi: zero_ratio must exceed 1");

    // |L(j wc)| = K sqrt(wc^2 + z^2) / wc^2 = 1 for L(s) = K (s + z) / s^2
    const double wc = kTwoPi * crossover_hz;
    const double z = wc / zero_ratio;
    const double k_loop = wc * wc / std::hypot(wc, z);

    PllDesign d;
    d.kp = k_loop / v_nominal;
    d.ki = k_loop * z / v_nominal;
    d.crossover_hz = crossover_hz;
    d.v_nominal = v_nominal;
    return d;
}

std::complex<double> pll_open_loop(const PllDesign& d, std::complex<double> s) {
    return (d.kp_loop() * s + d.ki_loop()) / (s * s);
}

std::complex<double> pll_closed_loop(const PllDesign& d, std::complex<double> s) {
    // written without the 1/s^2 so that s = 0 evaluates cleanly
    const std::complex<double> num = d.kp_loop() * s + d.ki_loop();
    return num / (s * s + num);
}

std::complex<double> pll_grid_phase_transfer(const PllDesign& d, std::complex<double> s) {
    return s / (s * s + d.kp_loop() * s + d.ki_loop());
}

double pll_realized_crossover_hz(const PllDesign& d) {
    // |L| is monotone decreasing in w for a PI loop
    auto gain = [&](double f) { return std::abs(pll_open_loop(d, {0.0, kTwoPi * f})); };
    double lo = 1e-6;
    double hi = 1e6;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        (gain(mid) > 1.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

double pll_phase_margin_deg(const PllDesign& d) {
    const double fc = pll_realized_crossover_hz(d);
    return 180.0 + std::arg(pll_open_loop(d, {0.0, kTwoPi * fc})) * 180.0 / kPi;
}

PllState pll_step(const PllState& state, double e, double dt, const PllDesign& design) {
    PllState next = state;
    next.integ = state.integ + 0.5 * (state.e_prev + e) * dt;
    next.e_prev = e;

    const double w_lo = 0.5 * design.omega_nominal;
    const double w_hi = 1.5 * design.omega_nominal;
    double omega = design.omega_nominal + design.kp_loop() * e + design.ki_loop() * next.integ;
    if (omega < w_lo || omega > w_hi) {
        // hold the integrator while saturated
        next.integ = state.integ;
        omega = std::clamp(design.omega_nominal + design.kp_loop() * e + design.ki_loop() * next.integ,
                           w_lo, w_hi);
    }
    const FrameAngle f = advance_frame({state.theta, state.omega}, omega, dt);
    next.theta = f.theta;
    next.omega = f.omega;
    return next;
}

double pll_error(Vec2 v_alpha_beta, double theta) {
    const Vec2 v = to_dq(v_alpha_beta, theta);
    const double mag = norm(v);
    return mag > 1e-9 ? v.y / mag : 0.0;
}

double lpf_of_primary_step(double omega_primary, LpfState& state, double cutoff_hz, double dt) {
    const double alpha = 1.0 - std::exp(-kTwoPi * cutoff_hz * dt);
    state.omega_filtered += alpha * (omega_primary - state.omega_filtered);
    return state.omega_filtered;
}

const char* to_string(FreqSourceKind kind) {
    switch (kind) {
        case FreqSourceKind::SecondaryPll: return "secondary";
        case FreqSourceKind::PrimaryPll: return "primary";
        case FreqSourceKind::LpfOfPrimary: return "lpf_primary";
    }
    return "unknown";
}

FrameTracker::FrameTracker(const FreqSourceConfig& cfg, double v_nominal, FrameAngle primary_at_start)
    : cfg_(cfg) {
    switch (cfg_.kind) {
        case FreqSourceKind::SecondaryPll:
            design_ = design_pi(cfg_.crossover_hz, v_nominal, cfg_.zero_ratio);
            pll_.theta = primary_at_start.theta;
            pll_.omega = primary_at_start.omega;
            frame_ = pll_.frame();
            break;
        case FreqSourceKind::PrimaryPll:
            frame_ = primary_at_start;
            break;
        case FreqSourceKind::LpfOfPrimary:
            lpf_.omega_filtered = primary_at_start.omega;
            frame_ = {wrap_angle(primary_at_start.theta - cfg_.psi0), primary_at_start.omega};
            break;
    }
}

void FrameTracker::advance(Vec2 v_alpha_beta, FrameAngle primary_next, double dt) {
    switch (cfg_.kind) {
        case FreqSourceKind::SecondaryPll:
            pll_ = pll_step(pll_, pll_error(v_alpha_beta, pll_.theta), dt, design_);
            frame_ = pll_.frame();
            break;
        case FreqSourceKind::PrimaryPll:
            frame_ = primary_next;
            break;
        case FreqSourceKind::LpfOfPrimary: {
            const double w = lpf_of_primary_step(primary_next.omega, lpf_, cfg_.lpf_cutoff_hz, dt);
            frame_ = advance_frame(frame_, w, dt);
            break;
        }
    }
}

}  // namespace lineid
