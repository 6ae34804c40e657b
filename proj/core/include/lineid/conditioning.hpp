#pragma once

// Prefiltering of dq signals and construction of the linear regression
//     y = u^T theta + w,   theta = [R, w0 L]
// from the d-axis line equation (and optionally the q-axis one).

#include "lineid/frames.hpp"
#include "lineid/linalg.hpp"
#include "lineid/pll.hpp"

#include <complex>
#include <span>
#include <vector>

namespace lineid {

/// Continuous-time (b2 s^2 + b1 s + b0) / (a2 s^2 + a1 s + a0).
struct AnalogBiquad {
    double b2 = 0.0, b1 = 0.0, b0 = 0.0;
    double a2 = 0.0, a1 = 0.0, a0 = 1.0;

    std::complex<double> response(double omega) const;
};

/// Discrete (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct BiquadCoeffs {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    std::complex<double> response(double omega, double dt) const;
};

/// Tustin transform without pre-warping. First-order sections stay first order.
BiquadCoeffs bilinear(const AnalogBiquad& h, double dt);

/// Transposed direct-form II section.
class Biquad {
public:
    Biquad() = default;
    explicit Biquad(BiquadCoeffs c) : c_(c) {}

    double step(double x) {
        const double y = c_.b0 * x + s1_;
        s1_ = c_.b1 * x - c_.a1 * y + s2_;
        s2_ = c_.b2 * x - c_.a2 * y;
        return y;
    }
    void reset() { s1_ = s2_ = 0.0; }
    const BiquadCoeffs& coeffs() const { return c_; }

private:
    BiquadCoeffs c_{};
    double s1_ = 0.0;
    double s2_ = 0.0;
};

/// Band-pass prefilter (w1 / (s + w1)) (s / (s + w2)), w1 the upper and w2 the
/// lower cutoff [rad/s], plus its derivative path s * BPF(s) as one proper filter.
struct BpfDesign {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double dt = 0.0;
    AnalogBiquad bpf;
    AnalogBiquad deriv;
    BiquadCoeffs bpf_z;
    BiquadCoeffs deriv_z;

    std::complex<double> response(double omega) const { return bpf.response(omega); }
    std::complex<double> deriv_response(double omega) const { return deriv.response(omega); }
};

/// Throws ConfigError unless omega1 > omega2 > 0 and dt > 0.
BpfDesign design_bpf(double omega1, double omega2, double dt);

enum class FilterKind { Bpf, DerivLpf };
enum class RegressorAxes { D, Dq };

const char* to_string(FilterKind k);
const char* to_string(RegressorAxes a);

/// One signal channel: the prefiltered value and the prefiltered derivative.
class ChannelFilter {
public:
    ChannelFilter() = default;
    ChannelFilter(FilterKind kind, const BpfDesign& design);

    /// Prefiltered value of x.
    double value(double x) { return value_.step(x); }
    /// Prefiltered derivative of x. Bpf: s*BPF(s) realized directly. DerivLpf:
    /// backward difference of the prefiltered signal.
    double derivative(double x);
    void reset();

private:
    FilterKind kind_ = FilterKind::Bpf;
    double dt_ = 0.0;
    Biquad value_;
    Biquad deriv_;
    double prev_ = 0.0;
    bool primed_ = false;
};

/// Single-channel filter state in the op-style API.
struct FilterState {
    Biquad bpf;
    Biquad deriv;
};

FilterState make_filter_state(const BpfDesign& design);
double bpf_step(FilterState& state, double x);
double derivative_path(FilterState& state, double x);

struct RegressorSample {
    Vec2 u;        ///< [BPF(i_d), BPF(di_d/dt)/w0 - (w/w0) BPF(i_q)]
    double y = 0.0;  ///< BPF(v_d)
    double t = 0.0;
};

/// Stacked d and q rows. Column j of `u` is the regressor of output j, so
/// y = u^T theta.
struct RegressorSampleDq {
    Mat2 u;
    Vec2 y;
    double t = 0.0;
};

struct ConditioningConfig {
    double lower_hz = 10.0;
    double upper_hz = 100.0;
    FilterKind filter = FilterKind::Bpf;
    RegressorAxes axes = RegressorAxes::D;
    double omega0 = kOmegaNominal;
};

/// Stateful regressor construction for one estimation chain. All six channels
/// (i_d, i_q, v_d, v_q and the two current derivatives) are always filtered, so
/// the d-row of the dq regressor is identical to the d-only regressor.
class RegressorBuilder {
public:
    RegressorBuilder(const ConditioningConfig& cfg, double dt);

    struct Output {
        RegressorSample d;
        RegressorSampleDq dq;
    };

    Output push(const DqSample& s);
    void reset();

    const BpfDesign& design() const { return design_; }
    const ConditioningConfig& config() const { return cfg_; }

private:
    ConditioningConfig cfg_;
    BpfDesign design_;
    ChannelFilter i_d_, i_q_, v_d_, v_q_;
    ChannelFilter di_d_, di_q_;
};

std::vector<RegressorSample> build_regressor(std::span<const DqSample> stream, const ConditioningConfig& cfg,
                                             double dt);
std::vector<RegressorSampleDq> build_regressor_dq(std::span<const DqSample> stream,
                                                  const ConditioningConfig& cfg, double dt);

}  // namespace lineid
