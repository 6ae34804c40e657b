#include "lineid/frames.hpp"

#include <cmath>
#include <stdexcept>

namespace lineid {

double wrap_angle(double theta) {
    double w = std::fmod(theta + kPi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    w -= kPi;
    // fmod rounding can land exactly on +pi
    if (w >= kPi) w -= kTwoPi;
    return w;
}

FrameAngle advance_frame(FrameAngle angle, double omega_new, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("advance_frame: dt must be positive");
    return {wrap_angle(angle.theta + 0.5 * (angle.omega + omega_new) * dt), omega_new};
}

Vec2 to_dq(Vec2 alpha_beta, double theta) {
    return rotate_to_dq(alpha_beta, std::cos(theta), std::sin(theta));
}

Vec2 from_dq(Vec2 dq, double theta) {
    return rotate_from_dq(dq, std::cos(theta), std::sin(theta));
}

DqSample to_dq(const StationarySample& s, FrameAngle angle) {
    const double c = std::cos(angle.theta);
    const double sn = std::sin(angle.theta);
    const Vec2 v = rotate_to_dq({s.v_alpha, s.v_beta}, c, sn);
    const Vec2 i = rotate_to_dq({s.i_alpha, s.i_beta}, c, sn);
    return {v.x, v.y, i.x, i.y, angle.omega, angle.theta, s.t};
}

StationarySample from_dq(const DqSample& s, FrameAngle angle) {
    const double c = std::cos(angle.theta);
    const double sn = std::sin(angle.theta);
    const Vec2 v = rotate_from_dq({s.v_d, s.v_q}, c, sn);
    const Vec2 i = rotate_from_dq({s.i_d, s.i_q}, c, sn);
    return {v.x, v.y, i.x, i.y, s.t};
}

}  // namespace lineid
