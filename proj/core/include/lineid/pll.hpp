#pragma once

// Synchronous-reference-frame PLLs.
//
// The loop drives the normalized q-axis voltage e = v_q / |v_c| (= sin psi_inv)
// to zero with a PI compensator H(s) = kp + ki/s. Gains are stored per volt and
// scaled by the nominal voltage inside the loop, so the realized open loop is
// L(s) = H(s) * v_nominal / s regardless of the measured magnitude.

#include "lineid/frames.hpp"

#include <complex>

namespace lineid {

inline constexpr double kOmegaNominal = kTwoPi * 60.0;

struct PllDesign {
    double kp = 0.0;            ///< rad/s per volt
    double ki = 0.0;            ///< rad/s^2 per volt
    double crossover_hz = 0.0;  ///< design target
    double v_nominal = 0.0;     ///< volts
    double omega_nominal = kOmegaNominal;

    /// Loop gains acting on the normalized error.
    double kp_loop() const { return kp * v_nominal; }
    double ki_loop() const { return ki * v_nominal; }
};

/// Places the PI zero `zero_ratio` times below the crossover and picks the
/// gain so that |H(jw) v_nominal / jw| = 1 at 2*pi*crossover_hz.
/// Throws std::invalid_argument on non-positive inputs.
PllDesign design_pi(double crossover_hz, double v_nominal, double zero_ratio = 100.0);

/// Open loop L(s) = H(s) v_nominal / s.
std::complex<double> pll_open_loop(const PllDesign& d, std::complex<double> s);
/// Closed loop Q(s) = L / (1 + L), the transfer from grid frequency to estimated frequency.
std::complex<double> pll_closed_loop(const PllDesign& d, std::complex<double> s);
/// (1/s)(1 - Q(s)): transfer from grid frequency to grid phase in the PLL frame.
std::complex<double> pll_grid_phase_transfer(const PllDesign& d, std::complex<double> s);
/// Frequency [Hz] where |L(j 2 pi f)| = 1, found by bisection on the analytic loop.
double pll_realized_crossover_hz(const PllDesign& d);
double pll_phase_margin_deg(const PllDesign& d);

struct PllState {
    double omega = kOmegaNominal;
    double theta = 0.0;
    double integ = 0.0;   ///< integral of the normalized error
    double e_prev = 0.0;

    FrameAngle frame() const { return {theta, omega}; }
};

/// One trapezoidal PI step; the frame angle advances with the new frequency.
/// Frequency is clamped to [0.5, 1.5] * omega_nominal with integrator anti-windup.
PllState pll_step(const PllState& state, double v_q_normalized, double dt, const PllDesign& design);

/// Normalized q-axis error of a stationary voltage in the given frame.
double pll_error(Vec2 v_alpha_beta, double theta);

struct LpfState {
    double omega_filtered = kOmegaNominal;
};

/// First-order low-pass of a frequency signal (exact zero-order-hold discretization).
double lpf_of_primary_step(double omega_primary, LpfState& state, double cutoff_hz, double dt);

enum class FreqSourceKind { SecondaryPll, PrimaryPll, LpfOfPrimary };

struct FreqSourceConfig {
    FreqSourceKind kind = FreqSourceKind::SecondaryPll;
    double crossover_hz = 1.0;   ///< secondary loop target
    double zero_ratio = 100.0;
    double lpf_cutoff_hz = 1.0;  ///< LpfOfPrimary only
    double psi0 = 0.0;           ///< LpfOfPrimary only: initial phase of v_c in the frame
};

const char* to_string(FreqSourceKind kind);

/// Supplies the estimation frame sample by sample. The primary (inverter
/// control) frame is passed in because two of the variants derive from it.
class FrameTracker {
public:
    FrameTracker(const FreqSourceConfig& cfg, double v_nominal, FrameAngle primary_at_start);

    /// Frame to use for the current sample.
    FrameAngle current() const { return frame_; }

    /// Advances to the next sample after the current measurement was consumed.
    void advance(Vec2 v_alpha_beta, FrameAngle primary_next, double dt);

    const FreqSourceConfig& config() const { return cfg_; }

private:
    FreqSourceConfig cfg_;
    PllDesign design_{};
    PllState pll_{};
    LpfState lpf_{};
    FrameAngle frame_{};
};

}  // namespace lineid
