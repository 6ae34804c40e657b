#include "lineid/estimators.hpp"

#include "lineid/errors.hpp"

#include <cmath>
#include <limits>

namespace lineid {

namespace {

constexpr double kDetGuard = 1e-15;
constexpr double kPsdTolerance = 1e-10;

/// Symmetrize and clamp tiny negative eigenvalues; reject anything worse.
Mat2 condition_psd(const Mat2& m, double t) {
    Mat2 s = symmetrized(m);
    if (s.a >= 0.0 && s.d >= 0.0 && s.det() >= 0.0) return s;
    SymEigen2 e = sym_eigen(s);
    for (double& v : e.values) {
        if (v < -kPsdTolerance) throw NumericalFault("estimator matrix lost positive semidefiniteness", t);
        if (v < 0.0) v = 0.0;
    }
    return symmetrized(e.reconstruct());
}

bool well_posed(const Mat2& r) {
    const double n = r.norm();
    return std::abs(r.det()) >= kDetGuard * n * n && n > 0.0;
}

/// theta' = theta + R'^-1 u e, skipped when R' is numerically singular.
void information_step(EstimatorState& s, const Mat2& r_next, Vec2 gain_dir, double t) {
    s.info = condition_psd(r_next, t);
    if (well_posed(s.info)) {
        s.theta = s.theta + inverse(s.info) * gain_dir;
    } else {
        ++s.skipped;
    }
    ++s.k;
}

/// U (y - U^T theta) for the stacked regressor.
Vec2 stacked_innovation(const RegressorSampleDq& x, Vec2 theta) {
    const Vec2 ud = x.u.col(0);
    const Vec2 uq = x.u.col(1);
    const double ed = x.y.x - dot(ud, theta);
    const double eq = x.y.y - dot(uq, theta);
    return ed * ud + eq * uq;
}

Mat2 stacked_outer(const RegressorSampleDq& x) {
    return x.u * x.u.transposed();
}

Mat2 vdf_discounted(const Mat2& r, const std::array<double, 2>& lambdas, const SymEigen2& eig) {
    if (lambdas[0] == 1.0 && lambdas[1] == 1.0) return r;
    return lambdas[0] * eig.values[0] * outer(eig.vectors[0], eig.vectors[0]) +
           lambdas[1] * eig.values[1] * outer(eig.vectors[1], eig.vectors[1]);
}

}  // namespace

const char* to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::Rls: return "rls";
        case EstimatorKind::CfRls: return "cf_rls";
        case EstimatorKind::Kalman: return "kalman";
        case EstimatorKind::VdfRls: return "vdf_rls";
    }
    return "unknown";
}

EstimatorState make_rls_state(Vec2 theta0, double r0_scale) {
    return {theta0, Mat2::scaled_identity(r0_scale), 0, 0};
}

EstimatorState make_kalman_state(Vec2 theta0, double r0_scale) {
    return {theta0, Mat2::scaled_identity(1.0 / r0_scale), 0, 0};
}

EstimatorState rls_update(const EstimatorState& state, const RegressorSample& x) {
    return cf_rls_update(state, x, {1.0});
}

EstimatorState cf_rls_update(const EstimatorState& state, const RegressorSample& x, CfRlsParams params) {
    EstimatorState s = state;
    const double e = x.y - dot(x.u, s.theta);
    information_step(s, params.lambda * state.info + outer(x.u, x.u), e * x.u, x.t);
    return s;
}

EstimatorState kalman_update(const EstimatorState& state, const RegressorSample& x, const KalmanParams& params) {
    EstimatorState s = state;
    const Mat2& p = state.info;
    const Vec2 pu = p * x.u;
    const double denom = params.s + dot(x.u, pu);
    if (!(denom > 0.0)) throw NumericalFault("kalman_update: S + u^T P u <= 0", x.t);
    const Vec2 gain = (1.0 / denom) * pu;
    s.theta = s.theta + (x.y - dot(x.u, s.theta)) * gain;
    s.info = condition_psd(p + params.q - outer(gain, pu), x.t);
    ++s.k;
    return s;
}

std::array<double, 2> vdf_forgetting(std::array<double, 2> alignment, VdfParams params) {
    return {alignment[0] > params.epsilon ? params.lambda : 1.0,
            alignment[1] > params.epsilon ? params.lambda : 1.0};
}

EstimatorState vdf_rls_update(const EstimatorState& state, const RegressorSample& x, VdfParams params) {
    EstimatorState s = state;
    const SymEigen2 eig = sym_eigen(state.info);
    const std::array<double, 2> align{std::abs(dot(eig.vectors[0], x.u)), std::abs(dot(eig.vectors[1], x.u))};
    const auto lambdas = vdf_forgetting(align, params);
    const double e = x.y - dot(x.u, s.theta);
    information_step(s, vdf_discounted(state.info, lambdas, eig) + outer(x.u, x.u), e * x.u, x.t);
    return s;
}

EstimatorState rls_update_dq(const EstimatorState& state, const RegressorSampleDq& x) {
    return cf_rls_update_dq(state, x, {1.0});
}

EstimatorState cf_rls_update_dq(const EstimatorState& state, const RegressorSampleDq& x, CfRlsParams params) {
    EstimatorState s = state;
    information_step(s, params.lambda * state.info + stacked_outer(x), stacked_innovation(x, s.theta), x.t);
    return s;
}

EstimatorState kalman_update_dq(const EstimatorState& state, const RegressorSampleDq& x,
                                const KalmanParams& params) {
    EstimatorState s = state;
    const Mat2& p = state.info;
    const Mat2 pu = p * x.u;
    const Mat2 innov_cov = Mat2::scaled_identity(params.s) + x.u.transposed() * pu;
    if (!(innov_cov.det() > 0.0) || !(innov_cov.a > 0.0)) {
        throw NumericalFault("kalman_update_dq: innovation covariance not positive definite", x.t);
    }
    const Mat2 gain = pu * inverse(innov_cov);
    const Vec2 resid{x.y.x - dot(x.u.col(0), s.theta), x.y.y - dot(x.u.col(1), s.theta)};
    s.theta = s.theta + gain * resid;
    s.info = condition_psd(p + params.q - gain * pu.transposed(), x.t);
    ++s.k;
    return s;
}

EstimatorState vdf_rls_update_dq(const EstimatorState& state, const RegressorSampleDq& x, VdfParams params) {
    EstimatorState s = state;
    const SymEigen2 eig = sym_eigen(state.info);
    // ||v_i^T U||_2 over the d and q columns
    const std::array<double, 2> align{norm(x.u.transposed() * eig.vectors[0]),
                                      norm(x.u.transposed() * eig.vectors[1])};
    const auto lambdas = vdf_forgetting(align, params);
    information_step(s, vdf_discounted(state.info, lambdas, eig) + stacked_outer(x),
                     stacked_innovation(x, s.theta), x.t);
    return s;
}

Mat2 cf_equivalent_process_noise(const Mat2& p, Vec2 u, double lambda) {
    const Vec2 pu = p * u;
    const Mat2 shrunk = p - (1.0 / (lambda + dot(u, pu))) * outer(pu, pu);
    return (1.0 / lambda - 1.0) * shrunk;
}

Vec2 batch_ls(std::span<const RegressorSample> samples, double lambda) {
    Mat2 info;
    Vec2 rhs;
    // Horner-style accumulation applies lambda^(K-k) without forming powers
    for (const RegressorSample& x : samples) {
        info = lambda * info + outer(x.u, x.u);
        rhs = lambda * rhs + x.y * x.u;
    }
    const double n = info.norm();
    if (n == 0.0 || info.det() == 0.0) throw NoSolutionError("batch_ls: information matrix is singular");
    const SymEigen2 e = sym_eigen(info);
    const double smax = std::abs(e.values[0]);
    const double smin = std::abs(e.values[1]);
    if (smin == 0.0 || smax / smin >= 1e12) {
        throw NoSolutionError("batch_ls: information matrix is rank deficient (condition number >= 1e12)");
    }
    return inverse(info) * rhs;
}

Estimator::Estimator(EstimatorSpec spec) : spec_(std::move(spec)) {
    state_ = spec_.kind == EstimatorKind::Kalman ? make_kalman_state(spec_.theta0, spec_.r0_scale)
                                                 : make_rls_state(spec_.theta0, spec_.r0_scale);
}

void Estimator::update(const RegressorSample& x) {
    switch (spec_.kind) {
        case EstimatorKind::Rls: state_ = rls_update(state_, x); break;
        case EstimatorKind::CfRls: state_ = cf_rls_update(state_, x, {spec_.lambda}); break;
        case EstimatorKind::Kalman: state_ = kalman_update(state_, x, spec_.kalman); break;
        case EstimatorKind::VdfRls: state_ = vdf_rls_update(state_, x, {spec_.lambda, spec_.epsilon}); break;
    }
}

void Estimator::update(const RegressorSampleDq& x) {
    switch (spec_.kind) {
        case EstimatorKind::Rls: state_ = rls_update_dq(state_, x); break;
        case EstimatorKind::CfRls: state_ = cf_rls_update_dq(state_, x, {spec_.lambda}); break;
        case EstimatorKind::Kalman: state_ = kalman_update_dq(state_, x, spec_.kalman); break;
        case EstimatorKind::VdfRls:
            state_ = vdf_rls_update_dq(state_, x, {spec_.lambda, spec_.epsilon});
            break;
    }
}

Mat2 Estimator::information() const {
    if (spec_.kind != EstimatorKind::Kalman) return state_.info;
    return std::abs(state_.info.det()) > 0.0 ? symmetrized(inverse(state_.info)) : Mat2{};
}

}  // namespace lineid
