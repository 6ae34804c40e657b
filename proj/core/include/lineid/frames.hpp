#pragma once

#include "lineid/linalg.hpp"

#include <numbers>

namespace lineid {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

/// Two-axis stationary (alpha-beta) measurement.
struct StationarySample {
    double v_alpha = 0.0;
    double v_beta = 0.0;
    double i_alpha = 0.0;
    double i_beta = 0.0;
    double t = 0.0;
};

/// Measurement projected into a rotating frame.
struct DqSample {
    double v_d = 0.0;
    double v_q = 0.0;
    double i_d = 0.0;
    double i_q = 0.0;
    double omega = 0.0;        ///< frame frequency [rad/s]
    double theta_frame = 0.0;  ///< frame angle, wrapped
    double t = 0.0;
};

/// Angle and rate of a rotating frame.
struct FrameAngle {
    double theta = 0.0;
    double omega = 0.0;
};

/// Trapezoidal advance of the frame angle to the next step.
/// Throws std::invalid_argument when dt <= 0.
FrameAngle advance_frame(FrameAngle angle, double omega_new, double dt);

/// z_d + j z_q = exp(-j theta) (z_alpha + j z_beta).
constexpr Vec2 rotate_to_dq(Vec2 ab, double cos_t, double sin_t) {
    return {cos_t * ab.x + sin_t * ab.y, -sin_t * ab.x + cos_t * ab.y};
}
constexpr Vec2 rotate_from_dq(Vec2 dq, double cos_t, double sin_t) {
    return {cos_t * dq.x - sin_t * dq.y, sin_t * dq.x + cos_t * dq.y};
}

Vec2 to_dq(Vec2 alpha_beta, double theta);
Vec2 from_dq(Vec2 dq, double theta);

DqSample to_dq(const StationarySample& sample, FrameAngle angle);
StationarySample from_dq(const DqSample& sample, FrameAngle angle);

}  // namespace lineid
