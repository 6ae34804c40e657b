#include "lineid/errors.hpp"
#include "lineid/plant.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

using namespace lineid;

namespace {

constexpr double kV = 391.9183588453085;
constexpr double kDt = 5e-5;

InverterState steady_state(const GridSource& g, double t, Vec2 i_dq) {
    InverterState s = make_inverter_state(g, 0.002);
    s.t = t;
    s.pll.theta = wrap_angle(g.angle(t));
    s.pll.omega = g.omega(t);
    s.i_d = s.i_d_ref = s.i_d_ref_prev = i_dq.x;
    s.i_q = s.i_q_ref = s.i_q_ref_prev = i_dq.y;
    return s;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(PlantOutput, SteadyStateLineEquation) {
    const GridSource g{kV, 59.99, 0.2, 0.0};
    const LineParams line{0.3, 1.4e-3};
    const double t = 0.123;
    const Vec2 i{12.0, -5.0};
    const MeasurementSample m = plant_output(steady_state(g, t, i), g, line);
    const double th = g.angle(t);
    const Vec2 vc = to_dq(m.v(), th);
    const Vec2 vg = to_dq(g.voltage(t), th);
    const Vec2 id = to_dq(m.i(), th);
    const double w = g.omega(t);
    EXPECT_NEAR(id.x, i.x, 1e-9);
    EXPECT_NEAR(id.y, i.y, 1e-9);
    EXPECT_NEAR(vc.x - vg.x, line.r * i.x - w * line.l * i.y, 1e-9);
    EXPECT_NEAR(vc.y - vg.y, line.r * i.y + w * line.l * i.x, 1e-9);
}

TEST(PlantOutput, OpenCircuitGivesGridVoltage) {
    const GridSource g{kV, 60.0, 0.0, 0.0};
    const MeasurementSample m = plant_output(steady_state(g, 0.5, {0.0, 0.0}), g, {0.3, 1e-3});
    EXPECT_EQ(m.v_c_alpha, g.voltage(0.5).x);
    EXPECT_EQ(m.v_c_beta, g.voltage(0.5).y);
}

TEST(PlantOutput, PureInductance) {
    const GridSource g{kV, 60.0, 0.0, 0.0};
    const LineParams line{0.0, 2e-3};
    const MeasurementSample m = plant_output(steady_state(g, 0.01, {0.0, 8.0}), g, line);
    const double th = g.angle(0.01);
    EXPECT_NEAR(to_dq(m.v(), th).x - to_dq(g.voltage(0.01), th).x, -g.omega(0.0) * line.l * 8.0, 1e-9);
}

TEST(SetpointToCurrent, Examples) {
    const double p0 = 30e3, q0 = 12e3;
    const auto a = setpoint_to_current(p0, 0.0, {kV, 0.0}, kV);
    ASSERT_TRUE(a);
    EXPECT_NEAR(a->x, 2.0 / 3.0 * p0 / kV, 1e-12);
    EXPECT_NEAR(a->y, 0.0, 1e-12);
    const auto b = setpoint_to_current(0.0, q0, {kV, 0.0}, kV);
    ASSERT_TRUE(b);
    EXPECT_NEAR(b->x, 0.0, 1e-12);
    EXPECT_NEAR(b->y, -2.0 / 3.0 * q0 / kV, 1e-12);
}

TEST(SetpointToCurrent, PowerRoundTrip) {
    const Vec2 v{380.0, -17.0};
    const auto i = setpoint_to_current(25e3, -7e3, v, kV);
    ASSERT_TRUE(i);
    EXPECT_NEAR(1.5 * (v.x * i->x + v.y * i->y), 25e3, 1e-9);
    EXPECT_NEAR(1.5 * (v.y * i->x - v.x * i->y), -7e3, 1e-9);
}

TEST(SetpointToCurrent, UndervoltageRejected) {
    EXPECT_FALSE(setpoint_to_current(1e3, 0.0, {0.05 * kV, 0.0}, kV));
}

TEST(InjectNoise, ZeroSigmaIsBitExact) {
    NoiseSource n(3);
    const MeasurementSample m{1.0 / 3.0, -2.5, 7.125, 0.1, 0.0};
    const MeasurementSample o = inject_noise(m, n, 0.0, 0.0);
    EXPECT_TRUE(same_bits(o.v_c_alpha, m.v_c_alpha));
    EXPECT_TRUE(same_bits(o.v_c_beta, m.v_c_beta));
    EXPECT_TRUE(same_bits(o.i_alpha, m.i_alpha));
    EXPECT_TRUE(same_bits(o.i_beta, m.i_beta));
}

TEST(InjectNoise, SeededStreamsRepeat) {
    NoiseSource a(42), b(42), c(43);
    bool differs = false;
    for (int k = 0; k < 1000; ++k) {
        const double x = a.draw();
        ASSERT_TRUE(same_bits(x, b.draw()));
        differs |= x != c.draw();
    }
    EXPECT_TRUE(differs);
}

TEST(InjectNoise, SampleVariance) {
    NoiseSource n(7);
    const double sigma_v = 0.2, sigma_i = 0.0015;
    const int count = 1000000;
    double sv = 0.0, si = 0.0, mv = 0.0;
    for (int k = 0; k < count; ++k) {
        const MeasurementSample o = inject_noise({}, n, sigma_v, sigma_i);
        sv += o.v_c_alpha * o.v_c_alpha;
        si += o.i_beta * o.i_beta;
        mv += o.v_c_beta;
    }
    EXPECT_NEAR(sv / count, sigma_v * sigma_v, 0.02 * sigma_v * sigma_v);
    EXPECT_NEAR(si / count, sigma_i * sigma_i, 0.02 * sigma_i * sigma_i);
    EXPECT_NEAR(mv / count, 0.0, 5.0 * sigma_v / std::sqrt(count));
}

TEST(ScheduleLookup, ClosedLeftIntervals) {
    const SetpointSchedule s{{{0.0, 1.0, 2.0}, {2.0, 3.0, 4.0}, {4.0, 5.0, 6.0}}};
    EXPECT_EQ(schedule_lookup(s, 1.999).p, 1.0);
    EXPECT_EQ(schedule_lookup(s, 2.0).p, 3.0);
    EXPECT_EQ(schedule_lookup(s, 2.0).q, 4.0);
    EXPECT_EQ(schedule_lookup(s, 1e6).p, 5.0);
    EXPECT_TRUE(s.violations().empty());
}

TEST(SetpointSchedule, Violations) {
    EXPECT_FALSE(SetpointSchedule{}.violations().empty());
    EXPECT_FALSE((SetpointSchedule{{{1.0, 0.0, 0.0}}}).violations().empty());
    EXPECT_FALSE((SetpointSchedule{{{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, {2.0, 0.0, 0.0}}}).violations().empty());
}

TEST(LineSchedule, StepAppliesAtItsTime) {
    const LineSchedule ls{{0.2, 1e-3}, ImpedanceStepEvent{10.0, {0.4, 2e-3}}};
    EXPECT_EQ(ls.at(9.99995).r, 0.2);
    EXPECT_EQ(ls.at(10.0).r, 0.4);
    EXPECT_EQ(ls.at(10.0).l, 2e-3);
}

TEST(PlantStep, LineEquationAgainstFiniteDifferences) {
    const GridSource g{kV, 59.99, 0.0, 0.0};
    const LineParams line{0.4, 2e-3};
    const PllDesign pll = design_pi(20.0, kV, 10.0);
    InverterState s = make_inverter_state(g, 0.002);
    std::vector<MeasurementSample> m;
    std::vector<Vec2> vg;
    for (int k = 0; k < 4000; ++k) {
        const PowerSetpoint sp = k < 2000 ? PowerSetpoint{3e3, 0.0} : PowerSetpoint{5e3, 1e3};
        const PlantStep ps = plant_step(s, g, line, sp, pll, kDt);
        m.push_back(ps.clean);
        vg.push_back(ps.v_grid);
        s = ps.state;
    }
    double worst = 0.0, worst_at_jump = 0.0, scale = 0.0;
    for (std::size_t k = 1; k + 1 < m.size(); ++k) {
        const Vec2 di = (1.0 / (2.0 * kDt)) * (m[k + 1].i() - m[k - 1].i());
        const Vec2 resid = m[k].v() - vg[k] - line.r * m[k].i() - line.l * di;
        // the first sample after a setpoint jump straddles two reference changes
        double& w = (k == 1 || k == 2001) ? worst_at_jump : worst;
        w = std::max(w, norm(resid));
        scale = std::max(scale, norm(line.l * di));
    }
    EXPECT_LT(worst, 1e-3 * scale);
    EXPECT_LT(worst_at_jump, 1e-2 * scale);
}

TEST(PlantStep, ReachesPowerSetpoint) {
    const GridSource g{kV, 59.99, 0.0, 0.0};
    const LineParams line{0.2, 1e-3};
    const PllDesign pll = design_pi(20.0, kV, 10.0);
    InverterState s = make_inverter_state(g, 0.002);
    PlantStep ps;
    for (int k = 0; k < 20000; ++k) {
        ps = plant_step(s, g, line, {4e3, -1e3}, pll, kDt);
        s = ps.state;
    }
    const Vec2 v = ps.clean.v();
    const Vec2 i = ps.clean.i();
    EXPECT_NEAR(1.5 * dot(v, i), 4e3, 1.0);
    EXPECT_NEAR(1.5 * (v.y * i.x - v.x * i.y), -1e3, 1.0);
    EXPECT_EQ(s.undervoltage_events, 0u);
}

TEST(PlantStep, NoiseReachesMeasurementOnly) {
    const GridSource g{kV, 59.99, 0.0, 0.0};
    const PllDesign pll = design_pi(20.0, kV, 10.0);
    InverterState a = make_inverter_state(g, 0.002), b = a;
    NoiseSource n(5);
    for (int k = 0; k < 3000; ++k) {
        const PlantStep pa = plant_step(a, g, {0.2, 1e-3}, {3e3, 500.0}, pll, kDt);
        const PlantStep pb = plant_step(b, g, {0.2, 1e-3}, {3e3, 500.0}, pll, kDt, &n, 0.2, 0.01);
        ASSERT_EQ(pa.clean.v_c_alpha, pb.clean.v_c_alpha);
        ASSERT_EQ(pa.clean.i_beta, pb.clean.i_beta);
        ASSERT_NE(pb.measured.v_c_alpha, pb.clean.v_c_alpha);
        a = pa.state;
        b = pb.state;
    }
}

TEST(PlantStep, CountsUndervoltage) {
    const GridSource g{1.0, 60.0, 0.0, 0.0};
    const PllDesign pll = design_pi(20.0, kV, 10.0);
    InverterState s = make_inverter_state(g, 0.002);
    for (int k = 0; k < 10; ++k) s = plant_step(s, g, {0.2, 1e-3}, {1e3, 0.0}, pll, kDt).state;
    EXPECT_EQ(s.undervoltage_events, 10u);
}
