

#include "lineid/plant.hpp"

#include "lineid/errors.hpp"

#include <cmath>
#include <string>

namespace lineid {

Vec2 GridSource::voltage(double t) const {
    const double a = angle(t);
    return {v_mag * std::cos(a), v_mag * std::sin(a)};
}

std::vector<std::string> SetpointSchedule::violations() const {
    std::vector<std::string> out;
    if (entries.empty()) {
        out.emplace_back("schedule: at least one setpoint entry is required");
        return out;
    }
    if (entries.front().t_start != 0.0) out.emplace_back("schedule: first entry must start at t=0");
    for (std::size_t k = 1; k < entries.size(); ++k) {
        if (!(entries[k].t_start > entries[k - 1].t_start)) {
            out.emplace_back("schedule: start times must be strictly increasing (entry " +
                             std::to_string(k) + ")");
        }
    }
    return out;
}

PowerSetpoint schedule_lookup(const SetpointSchedule& schedule, double t) {
    const auto& e = schedule.entries;
    // entries are few; a linear scan from the back is the cheapest closed-left search
    for (auto it = e.rbegin(); it != e.rend(); ++it) {
        if (t >= it->t_start) return {it->p, it->q};
    }
    return e.empty() ? PowerSetpoint{} : PowerSetpoint{e.front().p, e.front().q};
}

std::optional<Vec2> setpoint_to_current(double p, double q, Vec2 v, double v_nominal) {
    const double mag2 = v.x * v.x + v.y * v.y;
    if (std::sqrt(mag2) < 0.1 * v_nominal) return std::nullopt;
    const double k = 2.0 / (3.0 * mag2);
    return Vec2{k * (p * v.x + q * v.y), k * (p * v.y - q * v.x)};
}

MeasurementSample inject_noise(const MeasurementSample& clean, NoiseSource& noise, double sigma_v,
                               double sigma_i) {
    MeasurementSample out = clean;
    auto add = [&noise](double& x, double sigma) {
        const double n = noise.draw();
        if (sigma != 0.0) x += sigma * n;
    };
    add(out.v_c_alpha, sigma_v);
    add(out.v_c_beta, sigma_v);
    add(out.i_alpha, sigma_i);
    add(out.i_beta, sigma_i);
    return out;
}

InverterState make_inverter_state(const GridSource& grid, double tau_track) {
    InverterState s;
    s.tau_track = tau_track;
    s.pll.theta = wrap_angle(grid.angle(0.0));
    s.pll.omega = kOmegaNominal;
    return s;
}

MeasurementSample plant_output(const InverterState& s, const GridSource& grid, const LineParams& line) {
    const double c = std::cos(s.pll.theta);
    const double sn = std::sin(s.pll.theta);
    const Vec2 i_dq{s.i_d, s.i_q};
    // d/dt (e^{j theta} i_dq) = e^{j theta} (di_dq/dt + j omega i_dq)
    const Vec2 di_dq{(s.i_d_ref - s.i_d) / s.tau_track - s.pll.omega * s.i_q,
                     (s.i_q_ref - s.i_q) / s.tau_track + s.pll.omega * s.i_d};
    const Vec2 i = rotate_from_dq(i_dq, c, sn);
    const Vec2 di = rotate_from_dq(di_dq, c, sn);
    const Vec2 vg = grid.voltage(s.t);
    const Vec2 vc = line.r * i + line.l * di + vg;
    return {vc.x, vc.y, i.x, i.y, s.t};
}

PlantStep plant_step(const InverterState& s, const GridSource& grid, const LineParams& line,
                     PowerSetpoint setpoint, const PllDesign& primary, double dt, NoiseSource* noise,
                     double sigma_v, double sigma_i) {
    PlantStep out;
    const MeasurementSample before = plant_output(s, grid, line);
    out.v_grid = grid.voltage(s.t);
    out.primary_frame = s.pll.frame();

    InverterState n = s;
    // current relaxes toward the reference held over this interval
    const double decay = std::exp(-dt / s.tau_track);
    n.i_d = s.i_d_ref + (s.i_d - s.i_d_ref) * decay;
    n.i_q = s.i_q_ref + (s.i_q - s.i_q_ref) * decay;

    const Vec2 v_meas = before.v();
    const Vec2 v_dq = to_dq(v_meas, s.pll.theta);
    if (auto ref = setpoint_to_current(setpoint.p, setpoint.q, v_dq, primary.v_nominal)) {
        n.i_d_ref = ref->x;
        n.i_q_ref = ref->y;
    } else {
        ++n.undervoltage_events;
    }
    n.pll = pll_step(s.pll, pll_error(v_meas, s.pll.theta), dt, primary);
    n.t = s.t + dt;

    n.i_d_ref_prev = s.i_d_ref;
    n.i_q_ref_prev = s.i_q_ref;

    // di/dt jumps at t where the reference changes; the sample takes the mean of both sides
    InverterState mid = s;
    mid.i_d_ref = 0.5 * (s.i_d_ref + s.i_d_ref_prev);
    mid.i_q_ref = 0.5 * (s.i_q_ref + s.i_q_ref_prev);
    out.clean = plant_output(mid, grid, line);
    out.measured = noise ? inject_noise(out.clean, *noise, sigma_v, sigma_i) : out.clean;

    if (!std::isfinite(out.clean.v_c_alpha) || !std::isfinite(out.clean.v_c_beta) ||
        !std::isfinite(n.i_d) || !std::isfinite(n.i_q) || !std::isfinite(n.pll.omega)) {
        throw NumericalFault("plant_step: non-finite state", s.t - dt);
    }
    out.state = n;
    return out;
}

}  // namespace lineid
