#pragma once

#include <Eigen/Dense>

#include <optional>

#include "pdstab/plants.hpp"
#include "pdstab/types.hpp"

namespace pdstab::certificates {

// Generator of the reduced second-moment dynamics (p, r0, q) of the scalar
// closed loop: rows [[0, 2, 0], [a0, b0, 1], [c0^2, 2(a0 + c0 d0), 2 b0 + d0^2]].
Eigen::Matrix3d q_matrix(double a0, double b0, double c0, double d0);

// Coefficients of det(lambda I - Q) = lambda^3 + alpha2 lambda^2 + alpha1 lambda + alpha0.
struct AlphaTriple {
    double alpha0; // 2 (2 a0 b0 + a0 d0^2 - c0^2)
    double alpha1; // b0 d0^2 + 2 b0^2 - 4 a0 - 2 c0 d0
    double alpha2; // -(3 b0 + d0^2)
};

AlphaTriple alpha_coeffs(double a0, double b0, double c0, double d0);

// Third-order Routh-Hurwitz test: alpha2 > 0, alpha0 > 0, alpha1*alpha2 > alpha0,
// all strict. Equivalent to Q being Hurwitz.
bool routh_hurwitz(const AlphaTriple& alphas);

enum class Verdict { stable, unstable, marginal };

struct ScalarStability {
    Verdict verdict;
    AlphaTriple alpha;
};

// Mean-square stability of the scalar (n = 1) closed loop. Classified as
// marginal when any Routh-Hurwitz quantity sits within 1e-10 of its boundary.
ScalarStability ms_stable_scalar(const LinearPlant& plant, const Gains& gains);

// Sweeps the 2^5 sign corners of the uncertainty class plus the two
// distinguished plants (l1, l2, 0, 0, 0) and (l1, l2, -n1, -n2, m), in a fixed
// order, and returns the first plant the gains fail to stabilize.
std::optional<LinearPlant> worst_case_search(const Bounds& bounds, const Gains& gains);

struct LyapunovCertificate {
    double r;
    Eigen::MatrixXd m;   // n x n: -r b0 - a0^T - c0^T d0
    Eigen::MatrixXd p;   // 2n x 2n symmetric: [[sym(m), r I], [r I, I]]
    Eigen::MatrixXd lv;  // 2n x 2n generator matrix of V; block-diagonal by construction of m
    double lambda_min_p;
    double lambda_max_lv;
    double offdiag_rel;  // ||off-diagonal block of lv|| / ||lv||
    bool valid;          // lambda_min_p > 0 and lambda_max_lv < 0
};

// Quadratic Lyapunov certificate for the linear closed loop. For gains in
// omega and a plant inside the bounds the certificate is valid by
// construction; out-of-class inputs are still evaluated and only flagged.
// Throws std::domain_error when kp <= l1 (the constant r is undefined).
LyapunovCertificate lyapunov_linear(const Bounds& bounds, const Gains& gains, const LinearPlant& plant);

// Decay constant eta of the closed-loop Lyapunov drift bound
// LV(z) <= -eta ||z||^2: min of the two omega0 quadratic slacks. Positive
// exactly on omega0 (given positive gains).
double eta_margin(const Bounds& bounds, const Gains& gains);

// V(z) = kp kd z1'z1 + kp z1'z2 + (kd/2) z2'z2; positive definite when kd^2 > kp.
double nonlinear_lyapunov_value(const Gains& gains, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2);

} // namespace pdstab::certificates
