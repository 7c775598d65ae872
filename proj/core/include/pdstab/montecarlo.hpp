#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "pdstab/plants.hpp"
#include "pdstab/types.hpp"

namespace pdstab::mc {

struct SimConfig {
    double horizon = 10.0;
    double dt = 1e-3;
    int trials = 1;
    std::uint64_t master_seed = 0;
    Eigen::VectorXd x1_0, x2_0;

    void validate(Eigen::Index n) const; // throws std::invalid_argument
};

// One Euler-Maruyama sample path of the closed loop. The noise increment at
// every step is a single scalar shared across vector components (the driving
// Brownian motion is one dimensional), keyed by (master_seed, trial_index,
// step), so equal keys give bit-identical paths on any schedule.
struct Path {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> x1, x2, u; // u = kp (ystar - x1) - kd x2 at each grid time
    bool blew_up = false;
    double blowup_time = 0.0;
};

Path simulate_path(const NonlinearPlant& plant, const Gains& gains, const SimConfig& cfg, int trial_index);
Path simulate_path(const LinearPlant& plant, const Gains& gains, const SimConfig& cfg, int trial_index);

struct MsEstimate {
    std::vector<double> times;
    std::vector<double> mean_sq; // sample mean of ||e||^2 + ||de/dt||^2 over alive trials
    std::vector<double> std_err; // standard error of that mean; 0 for a single sample
    std::vector<int> n_alive;    // trials not yet truncated at each grid time
    int trials = 0;
    int blowups = 0;             // truncated trials, tallied, never averaged in
    bool degenerate = false;     // trials == 1: variance undefined
};

// Monte Carlo estimate of E[||e(t)||^2 + ||de/dt||^2]. Trials are reduced
// over a fixed pairwise tree keyed by trial index, so the result is
// bit-identical for any thread count. Throws BlowupError if every trial
// truncates before the horizon.
MsEstimate estimate_ms(const NonlinearPlant& plant, const Gains& gains, const SimConfig& cfg, int threads = 1);
MsEstimate estimate_ms(const LinearPlant& plant, const Gains& gains, const SimConfig& cfg, int threads = 1);

enum class McVerdict { converged, not_converged };

// converged iff the mean over the trailing `tail` fraction of the grid is
// below threshold * mean_sq(0); against the absolute threshold when
// mean_sq(0) = 0.
McVerdict convergence_verdict(const MsEstimate& est, double threshold, double tail);

struct Prop1Report {
    MsEstimate estimate;
    double tail_error_sq;     // empirical limit of ||e||^2
    double expected_error_sq; // ||delta||^2 / kp^2
};

// Equilibrium-necessity scenario: the plant f = delta + u, g = 0 violates the
// equilibrium premise for delta != 0, and the regulation error converges to
// delta/kp instead of zero. Requires gains that stabilize the unperturbed
// double integrator.
Prop1Report proposition1_demo(const Eigen::VectorXd& delta, const Gains& gains, const SimConfig& cfg,
                              int threads = 1, double tail = 0.2);

} // namespace pdstab::mc
