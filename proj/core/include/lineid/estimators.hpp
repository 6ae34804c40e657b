#pragma once

// Recursive estimators of theta = [R, w0 L] from the conditioned regression
// y = u^T theta + w.
//
//   RLS       R' = R + u u^T
//   CF-RLS    R' = lambda R + u u^T
//   VDF-RLS   R' = sum_i lambda_i sigma_i v_i v_i^T + u u^T, where lambda_i = lambda
//             only for eigendirections with |v_i^T u| > epsilon
//   Kalman    random-walk parameter model, covariance form
//
// The RLS family updates theta' = theta + R'^-1 u (y - u^T theta) from the
// information matrix; the Kalman filter propagates the covariance P directly.

#include "lineid/conditioning.hpp"
#include "lineid/linalg.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace lineid {

enum class EstimatorKind { Rls, CfRls, Kalman, VdfRls };

const char* to_string(EstimatorKind k);

struct EstimatorState {
    Vec2 theta;           ///< [R_hat, w0 L_hat]
    Mat2 info;            ///< information matrix R (RLS family) or covariance P (Kalman)
    std::uint64_t k = 0;  ///< samples consumed
    std::uint64_t skipped = 0;  ///< estimate updates suppressed by the determinant guard
};

struct CfRlsParams {
    double lambda = 0.99995;
};

struct KalmanParams {
    double s = 0.995;                          ///< measurement-noise variance
    Mat2 q = Mat2::scaled_identity(1e-5);      ///< process-noise covariance
};

struct VdfParams {
    double lambda = 0.995;
    double epsilon = 0.2;  ///< alignment threshold in units of u
};

/// Initial state for the RLS family: info = r0_scale * I.
EstimatorState make_rls_state(Vec2 theta0, double r0_scale);
/// Initial Kalman state: P0 = (1 / r0_scale) * I, so P0 = R0^-1.
EstimatorState make_kalman_state(Vec2 theta0, double r0_scale);

EstimatorState rls_update(const EstimatorState& state, const RegressorSample& sample);
EstimatorState cf_rls_update(const EstimatorState& state, const RegressorSample& sample, CfRlsParams params);
/// Throws NumericalFault if S + u^T P u <= 0.
EstimatorState kalman_update(const EstimatorState& state, const RegressorSample& sample,
                             const KalmanParams& params);
EstimatorState vdf_rls_update(const EstimatorState& state, const RegressorSample& sample, VdfParams params);

// Two-output (d and q row) variants. Alignment for VDF uses ||v_i^T U||_2.
EstimatorState rls_update_dq(const EstimatorState& state, const RegressorSampleDq& sample);
EstimatorState cf_rls_update_dq(const EstimatorState& state, const RegressorSampleDq& sample,
                                CfRlsParams params);
EstimatorState kalman_update_dq(const EstimatorState& state, const RegressorSampleDq& sample,
                                const KalmanParams& params);
EstimatorState vdf_rls_update_dq(const EstimatorState& state, const RegressorSampleDq& sample,
                                 VdfParams params);

/// Per-direction forgetting factors for VDF-RLS from the alignments |v_i^T u|
/// (or ||v_i^T U||) of the regressor with the eigenvectors of R.
std::array<double, 2> vdf_forgetting(std::array<double, 2> alignment, VdfParams params);

/// Process noise that makes the Kalman filter reproduce CF-RLS exactly
/// when S = lambda and P = R^-1:
///   Q = (1/lambda - 1) (P - P u u^T P / (lambda + u^T P u)).
Mat2 cf_equivalent_process_noise(const Mat2& p, Vec2 u, double lambda);

/// Weighted least squares with weights lambda^(K-k), solved from the normal
/// equations. Throws NoSolutionError when the weighted information matrix is
/// singular or its condition number exceeds 1e12.
Vec2 batch_ls(std::span<const RegressorSample> samples, double lambda);

/// Runtime description of one estimator in a scenario.
struct EstimatorSpec {
    std::string name;
    EstimatorKind kind = EstimatorKind::VdfRls;
    double lambda = 0.995;     ///< CF-RLS / VDF-RLS
    double epsilon = 0.2;      ///< VDF-RLS
    KalmanParams kalman;
    Vec2 theta0;
    double r0_scale = 1e-3;
};

/// Type-erased estimator advancing one EstimatorState.
class Estimator {
public:
    explicit Estimator(EstimatorSpec spec);

    void update(const RegressorSample& sample);
    void update(const RegressorSampleDq& sample);

    const EstimatorSpec& spec() const { return spec_; }
    const EstimatorState& state() const { return state_; }
    Vec2 theta() const { return state_.theta; }
    /// Information matrix regardless of form (P^-1 for the Kalman filter).
    Mat2 information() const;

private:
    EstimatorSpec spec_;
    EstimatorState state_;
};

}  // namespace lineid
