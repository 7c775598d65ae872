#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "pdstab/types.hpp"

namespace pdstab {

// Operator (spectral) norm: square root of the largest eigenvalue of P^T P,
// computed with a symmetric eigensolver.
double spectral_norm(const Eigen::MatrixXd& p);

// Linear plant dx1 = x2 dt, dx2 = (a x1 + b x2 + u) dt + (c x1 + d x2 + e u) dB
// with n x n coefficient matrices. Membership in the uncertainty class means
// ||a|| <= l1, ||b|| <= l2, ||c|| <= n1, ||d|| <= n2, ||e|| <= m.
struct LinearPlant {
    Eigen::MatrixXd a, b, c, d, e;

    Eigen::Index n() const { return a.rows(); }
};

LinearPlant scalar_plant(double a, double b, double c, double d, double e);

// The adversarial vertex of the uncertainty class: a = l1*I, b = l2*I,
// c = -n1*I, d = -n2*I, e = m*I. Its closed loop attains the region
// inequality with equality in the alpha0 coefficient.
LinearPlant corner_plant(const Bounds& bounds, Eigen::Index n = 1);

struct MatrixCheck {
    std::string name;
    double norm;
    double bound;
    bool ok;
};

struct PlantValidation {
    std::array<MatrixCheck, 5> checks;
    bool pass;
};

PlantValidation validate_linear_plant(const LinearPlant& plant, const Bounds& bounds);

// Closed loop of a linear plant under u = -kp x1 - kd x2:
//   a0 = a - kp I, b0 = b - kd I, c0 = c - kp e, d0 = d - kd e,
//   drift = [[0, I], [a0, b0]], diffusion = [[0, 0], [c0, d0]].
struct ClosedLoopLinear {
    Eigen::MatrixXd a0, b0, c0, d0;
    Eigen::MatrixXd drift;      // 2n x 2n
    Eigen::MatrixXd diffusion;  // 2n x 2n

    Eigen::Index n() const { return a0.rows(); }
};

ClosedLoopLinear closed_loop(const LinearPlant& plant, const Gains& gains);

// Re-assembles the block matrices from the four closed-loop coefficients.
ClosedLoopLinear assemble_closed_loop(const Eigen::MatrixXd& a0, const Eigen::MatrixXd& b0,
                                      const Eigen::MatrixXd& c0, const Eigen::MatrixXd& d0);

// General plant with drift f and diffusion g mapping (x1, x2, u) in R^{3n}
// to R^n. The scalar Brownian driver multiplies g as a whole.
struct NonlinearPlant {
    Eigen::Index n;
    Eigen::VectorXd ystar;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)> f;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)> g;
    Bounds declared_bounds;
};

// Wraps a linear plant as a NonlinearPlant regulating to ystar:
// f = a (x1 - ystar) + b x2 + u, g = c (x1 - ystar) + d x2 + e u.
NonlinearPlant as_nonlinear(const LinearPlant& plant, const Eigen::VectorXd& ystar);

enum class PlantKind {
    sine,               // sinusoidally saturated drift and diffusion
    nonaffine_sine,     // sine family with a non-affine input channel
    corner_linear,      // linear plant at the adversarial vertex of the class
    offset_equilibrium, // f = delta + u, g = 0; breaks the equilibrium premise
};

struct PlantParams {
    double eps = 0.1;       // nonaffine_sine input-channel perturbation, >= 0
    Eigen::VectorXd delta;  // offset_equilibrium constant drift
};

// Built-in plant families whose Jacobian bounds hold globally and equal the
// declared bounds. All maps apply componentwise.
NonlinearPlant benchmark_plant(PlantKind kind, const Bounds& bounds, Eigen::Index n,
                               const Eigen::VectorXd& ystar, const PlantParams& params = {});

struct EquilibriumCheck {
    double f_norm;
    double g_norm;
    bool ok;
};

// Verifies f(ystar, 0, 0) = 0 and g(ystar, 0, 0) = 0 within tol.
EquilibriumCheck check_equilibrium(const NonlinearPlant& plant, double tol = 1e-9);

struct JacobianCheck {
    double max_df_dx1, max_df_dx2;
    double max_dg_dx1, max_dg_dx2, max_dg_du;
    double min_eig_df_du;
    bool within_bounds;   // all sampled norms <= declared bound + tol
    bool control_gain_ok; // min eigenvalue of sym(df/du) >= 1 - tol
};

// Sampled check of the declared Jacobian bounds by central differences at
// random points. Advisory: it cannot certify the uniform bounds.
JacobianCheck check_jacobian_bounds(const NonlinearPlant& plant, int points, std::uint64_t seed,
                                    double step = 1e-5, double tol = 1e-4);

} // namespace pdstab
