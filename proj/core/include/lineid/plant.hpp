#pragma once

// Average-model simulation of a grid-following inverter feeding a stiff grid
// through a series R-L (Thevenin) branch.
//
// The inverter's closed current loop is a first-order lag in its own (primary
// PLL) frame. Terminal voltage follows from V_c = R i + L di/dt + V_g with the
// analytic di/dt of that lag. Where the reference changes at a sample, di/dt
// is taken as the mean of its two one-sided values.

#include "lineid/frames.hpp"
#include "lineid/pll.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lineid {

struct LineParams {
    double r = 0.0;  ///< ohms
    double l = 0.0;  ///< henries

    /// Scaled parameter vector [R, w0 L] used by the estimators.
    Vec2 theta() const { return {r, kOmegaNominal * l}; }
    static LineParams from_theta(Vec2 theta) { return {theta.x, theta.y / kOmegaNominal}; }
};

struct GridSource {
    double v_mag = 0.0;    ///< phase peak [V]
    double freq_hz = 60.0;
    double phase0 = 0.0;   ///< rad
    double freq_ramp_hz_per_s = 0.0;

    double omega(double t) const { return kTwoPi * (freq_hz + freq_ramp_hz_per_s * t); }
    double angle(double t) const {
        return phase0 + kTwoPi * (freq_hz * t + 0.5 * freq_ramp_hz_per_s * t * t);
    }
    Vec2 voltage(double t) const;
};

struct ImpedanceStepEvent {
    double t_step = 0.0;
    LineParams params_after;
};

/// Line parameters over time; the step applies for t >= t_step.
struct LineSchedule {
    LineParams initial;
    std::optional<ImpedanceStepEvent> step;

    LineParams at(double t) const {
        return step && t >= step->t_step ? step->params_after : initial;
    }
};

struct PowerSetpoint {
    double p = 0.0;  ///< W
    double q = 0.0;  ///< var
};

struct SetpointEntry {
    double t_start = 0.0;
    double p = 0.0;
    double q = 0.0;
};

struct SetpointSchedule {
    std::vector<SetpointEntry> entries;

    /// Empty schedules, a first entry not at t=0, or non-increasing starts.
    std::vector<std::string> violations() const;
};

/// Piecewise-constant lookup on closed-left intervals; the last entry holds forever.
PowerSetpoint schedule_lookup(const SetpointSchedule& schedule, double t);

/// Amplitude-invariant P/Q to dq current. Returns nullopt when |v_c| is below
/// 10% of `v_nominal`.
std::optional<Vec2> setpoint_to_current(double p, double q, Vec2 v_c_dq, double v_nominal);

struct MeasurementSample {
    double v_c_alpha = 0.0;
    double v_c_beta = 0.0;
    double i_alpha = 0.0;
    double i_beta = 0.0;
    double t = 0.0;

    Vec2 v() const { return {v_c_alpha, v_c_beta}; }
    Vec2 i() const { return {i_alpha, i_beta}; }
    StationarySample stationary() const { return {v_c_alpha, v_c_beta, i_alpha, i_beta, t}; }
};

/// Gaussian measurement noise with its own seeded stream.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : rng_(seed) {}

    double draw() { return normal_(rng_); }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Adds independent zero-mean noise to every channel. A zero sigma leaves the
/// channel bit-identical (its draw is still consumed).
MeasurementSample inject_noise(const MeasurementSample& clean, NoiseSource& noise, double sigma_v,
                               double sigma_i);

struct InverterState {
    double i_d = 0.0;  ///< injected current in the primary frame [A]
    double i_q = 0.0;
    double i_d_ref = 0.0;      ///< reference held over the coming interval
    double i_q_ref = 0.0;
    double i_d_ref_prev = 0.0; ///< reference of the interval that just ended
    double i_q_ref_prev = 0.0;
    double tau_track = 0.01;
    PllState pll;      ///< primary (control) PLL
    double t = 0.0;
    std::uint64_t undervoltage_events = 0;
};

InverterState make_inverter_state(const GridSource& grid, double tau_track);

struct PlantStep {
    InverterState state;          ///< advanced by dt
    MeasurementSample clean;      ///< at the pre-step time
    MeasurementSample measured;   ///< clean plus noise (equals clean without a noise source)
    Vec2 v_grid;                  ///< grid voltage (stationary) at the pre-step time
    FrameAngle primary_frame;     ///< control frame the sample was taken in
};

/// Terminal quantities implied by the state, before any noise.
MeasurementSample plant_output(const InverterState& state, const GridSource& grid, const LineParams& line);

/// One fixed step. The inverter controls from the noise-free terminal quantities:
/// its PLL tracks v_c, and the current reference for the next interval is
/// recomputed from `setpoint`. The current lag is integrated exactly. Noise is
/// added to `measured` only.
/// Throws NumericalFault on non-finite values.
PlantStep plant_step(const InverterState& state, const GridSource& grid, const LineParams& line,
                     PowerSetpoint setpoint, const PllDesign& primary, double dt,
                     NoiseSource* noise = nullptr, double sigma_v = 0.0, double sigma_i = 0.0);

}  // namespace lineid
