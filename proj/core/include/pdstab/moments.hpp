#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "pdstab/plants.hpp"

namespace pdstab::moments {

enum class Method { rk4, expm };

struct MomentState {
    double t;
    Eigen::MatrixXd p; // 2n x 2n second-moment matrix, kept symmetric
};

struct MomentTrajectory {
    std::vector<MomentState> states; // uniform spacing dt, t strictly increasing
    double dt = 0.0;
    Method method = Method::rk4;
    bool blew_up = false;
    double blowup_time = 0.0;
};

// Integrates dP/dt = A P + P A' + B P B' from the symmetric PSD start p0.
// rk4 is the classical one-step scheme; expm propagates the vectorized system
// exactly through exp((I kron A + A kron I + B kron B) dt). Symmetry is
// re-enforced after every step. Integration stops early (with the blow-up
// flag set) once the trace exceeds 1e12 times its initial value or turns
// non-finite; that is itself mean-square instability evidence.
MomentTrajectory propagate(const ClosedLoopLinear& cl, const Eigen::MatrixXd& p0, double horizon, double dt,
                           Method method = Method::rk4);

struct ScalarMomentState {
    double t;
    double p, r0, q; // E[z1^2], E[z1 z2], E[z2^2]
};

struct ScalarMomentTrajectory {
    std::vector<ScalarMomentState> states;
    double dt = 0.0;
    bool blew_up = false;
    double blowup_time = 0.0;
};

// Reduced scalar moment dynamics d/dt (p, r0, q)' = Q (p, r0, q)'.
ScalarMomentTrajectory propagate_scalar(double a0, double b0, double c0, double d0,
                                        const std::array<double, 3>& start, double horizon, double dt,
                                        Method method = Method::rk4);

// Largest real part over the roots of the characteristic cubic of Q, by a
// closed-form solve with explicit multiple-root handling.
double spectral_abscissa_scalar(double a0, double b0, double c0, double d0);

struct DecayEstimate {
    double rate;     // least-squares slope of log trace over the fit window
    double residual; // rms residual of the fit
};

// Fits the trailing `window` fraction of the trajectory.
DecayEstimate decay_rate(const MomentTrajectory& traj, double window = 0.5);

enum class TraceVerdict { decayed, not_decayed };

struct StabilizationReport {
    TraceVerdict verdict;
    double initial_trace;
    double final_trace;
};

// decayed iff trace(P(T)) < threshold * trace(P(0)).
StabilizationReport stabilization_verdict(const MomentTrajectory& traj, double threshold);

} // namespace pdstab::moments
