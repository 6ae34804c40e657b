#include "lineid/conditioning.hpp"

#include "lineid/errors.hpp"

#include <string>

namespace lineid {

std::complex<double> AnalogBiquad::response(double omega) const {
    const std::complex<double> s{0.0, omega};
    return (b2 * s * s + b1 * s + b0) / (a2 * s * s + a1 * s + a0);
}

std::complex<double> BiquadCoeffs::response(double omega, double dt) const {
    const std::complex<double> zi = std::exp(std::complex<double>{0.0, -omega * dt});
    return (b0 + b1 * zi + b2 * zi * zi) / (1.0 + a1 * zi + a2 * zi * zi);
}

BiquadCoeffs bilinear(const AnalogBiquad& h, double dt) {
    const double k = 2.0 / dt;
    BiquadCoeffs c;
    if (h.a2 == 0.0 && h.b2 == 0.0) {
        const double n = h.a1 * k + h.a0;
        c.b0 = (h.b1 * k + h.b0) / n;
        c.b1 = (-h.b1 * k + h.b0) / n;
        c.a1 = (-h.a1 * k + h.a0) / n;
        return c;
    }
    const double k2 = k * k;
    const double n = h.a2 * k2 + h.a1 * k + h.a0;
    c.b0 = (h.b2 * k2 + h.b1 * k + h.b0) / n;
    c.b1 = (-2.0 * h.b2 * k2 + 2.0 * h.b0) / n;
    c.b2 = (h.b2 * k2 - h.b1 * k + h.b0) / n;
    c.a1 = (-2.0 * h.a2 * k2 + 2.0 * h.a0) / n;
    c.a2 = (h.a2 * k2 - h.a1 * k + h.a0) / n;
    return c;
}

BpfDesign design_bpf(double omega1, double omega2, double dt) {
    std::vector<std::string> bad;
    if (!(omega2 > 0.0)) bad.emplace_back("bpf: lower cutoff must be positive");
    if (!(omega1 > omega2)) bad.emplace_back("bpf: upper cutoff must exceed lower cutoff");
    if (!(dt > 0.0)) bad.emplace_back("bpf: dt must be positive");
    if (!bad.empty()) throw ConfigError(std::move(bad));

    BpfDesign d;
    d.omega1 = omega1;
    d.omega2 = omega2;
    d.dt = dt;
    // (s + w1)(s + w2) = s^2 + (w1 + w2) s + w1 w2
    d.bpf = {0.0, omega1, 0.0, 1.0, omega1 + omega2, omega1 * omega2};
    d.deriv = {omega1, 0.0, 0.0, 1.0, omega1 + omega2, omega1 * omega2};
    d.bpf_z = bilinear(d.bpf, dt);
    d.deriv_z = bilinear(d.deriv, dt);
    return d;
}

const char* to_string(FilterKind k) {
    return k == FilterKind::Bpf ? "bpf" : "deriv_lpf";
}

const char* to_string(RegressorAxes a) {
    return a == RegressorAxes::D ? "d" : "dq";
}

ChannelFilter::ChannelFilter(FilterKind kind, const BpfDesign& design) : kind_(kind), dt_(design.dt) {
    if (kind == FilterKind::Bpf) {
        value_ = Biquad(design.bpf_z);
        deriv_ = Biquad(design.deriv_z);
    } else {
        // (w1 / (s + w1)) (s / w2): same low-frequency magnitude as the BPF, no roll-off
        const AnalogBiquad f{0.0, design.omega1 / design.omega2, 0.0, 0.0, 1.0, design.omega1};
        value_ = Biquad(bilinear(f, design.dt));
        deriv_ = value_;
    }
}

double ChannelFilter::derivative(double x) {
    if (kind_ == FilterKind::Bpf) return deriv_.step(x);
    const double f = deriv_.step(x);
    const double d = primed_ ? (f - prev_) / dt_ : 0.0;
    prev_ = f;
    primed_ = true;
    return d;
}

void ChannelFilter::reset() {
    value_.reset();
    deriv_.reset();
    prev_ = 0.0;
    primed_ = false;
}

FilterState make_filter_state(const BpfDesign& design) {
    return {Biquad(design.bpf_z), Biquad(design.deriv_z)};
}

double bpf_step(FilterState& state, double x) { return state.bpf.step(x); }

double derivative_path(FilterState& state, double x) { return state.deriv.step(x); }

RegressorBuilder::RegressorBuilder(const ConditioningConfig& cfg, double dt)
    : cfg_(cfg), design_(design_bpf(kTwoPi * cfg.upper_hz, kTwoPi * cfg.lower_hz, dt)) {
    i_d_ = i_q_ = v_d_ = v_q_ = di_d_ = di_q_ = ChannelFilter(cfg.filter, design_);
}

RegressorBuilder::Output RegressorBuilder::push(const DqSample& s) {
    const double w0 = cfg_.omega0;
    const double fid = i_d_.value(s.i_d);
    const double fiq = i_q_.value(s.i_q);
    const double fvd = v_d_.value(s.v_d);
    const double fvq = v_q_.value(s.v_q);
    const double fdid = di_d_.derivative(s.i_d);
    const double fdiq = di_q_.derivative(s.i_q);

    // omega varies slowly in the estimation frame, so BPF(omega i) ~ omega BPF(i)
    const Vec2 ud{fid, fdid / w0 - (s.omega / w0) * fiq};
    const Vec2 uq{fiq, (fdiq + s.omega * fid) / w0};

    Output out;
    out.d = {ud, fvd, s.t};
    out.dq = {Mat2::from_columns(ud, uq), {fvd, fvq}, s.t};
    return out;
}

void RegressorBuilder::reset() {
    for (ChannelFilter* f : {&i_d_, &i_q_, &v_d_, &v_q_, &di_d_, &di_q_}) f->reset();
}

std::vector<RegressorSample> build_regressor(std::span<const DqSample> stream, const ConditioningConfig& cfg,
                                             double dt) {
    RegressorBuilder b(cfg, dt);
    std::vector<RegressorSample> out;
    out.reserve(stream.size());
    for (const DqSample& s : stream) out.push_back(b.push(s).d);
    return out;
}

std::vector<RegressorSampleDq> build_regressor_dq(std::span<const DqSample> stream,
                                                  const ConditioningConfig& cfg, double dt) {
    RegressorBuilder b(cfg, dt);
    std::vector<RegressorSampleDq> out;
    out.reserve(stream.size());
    for (const DqSample& s : stream) out.push_back(b.push(s).dq);
    return out;
}

}  // namespace lineid
