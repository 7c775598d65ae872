#include <gtest/gtest.h>

#include <cmath>

#include "pdstab/errors.hpp"
#include "pdstab/moments.hpp"
#include "pdstab/montecarlo.hpp"
#include "pdstab/regions.hpp"
#include "test_util.hpp"

using namespace pdstab;
using namespace pdstab::mc;

namespace {

SimConfig scalar_config(double horizon, double dt, int trials, std::uint64_t seed, double x1, double x2) {
    SimConfig cfg;
    cfg.horizon = horizon;
    cfg.dt = dt;
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.x1_0 = Eigen::VectorXd::Constant(1, x1);
    cfg.x2_0 = Eigen::VectorXd::Constant(1, x2);
    return cfg;
}

} // namespace

TEST(SimulatePath, DeterministicPerKey) {
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.3};
    const NonlinearPlant plant = benchmark_plant(PlantKind::sine, b, 1, Eigen::VectorXd::Zero(1));
    const SimConfig cfg = scalar_config(1.0, 1e-3, 4, 11, 1.0, -0.5);
    const Path p1 = simulate_path(plant, Gains{2, 3}, cfg, 2);
    const Path p2 = simulate_path(plant, Gains{2, 3}, cfg, 2);
    ASSERT_EQ(p1.times.size(), p2.times.size());
    for (std::size_t k = 0; k < p1.times.size(); ++k) {
        EXPECT_EQ(p1.x1[k], p2.x1[k]);
        EXPECT_EQ(p1.x2[k], p2.x2[k]);
    }
    const Path p3 = simulate_path(plant, Gains{2, 3}, cfg, 3);
    EXPECT_NE(p1.x2.back()(0), p3.x2.back()(0));
}

TEST(SimulatePath, PdLawHoldsExactlyAlongThePath) {
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.3};
    const Eigen::VectorXd ystar = Eigen::VectorXd::Constant(2, 0.4);
    const NonlinearPlant plant = benchmark_plant(PlantKind::sine, b, 2, ystar);
    SimConfig cfg;
    cfg.horizon = 0.5;
    cfg.dt = 1e-3;
    cfg.trials = 1;
    cfg.master_seed = 5;
    cfg.x1_0 = Eigen::VectorXd::Constant(2, 1.0);
    cfg.x2_0 = Eigen::VectorXd::Constant(2, -0.2);
    const Gains g{2.5, 3.5};
    const Path path = simulate_path(plant, g, cfg, 0);
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        const Eigen::VectorXd expected = g.kp * (ystar - path.x1[k]) - g.kd * path.x2[k];
        EXPECT_EQ(path.u[k], expected);
    }
}

TEST(SimulatePath, EquilibriumIsInvariant) {
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.3};
    const Eigen::VectorXd ystar = Eigen::VectorXd::Constant(1, 0.7);
    const NonlinearPlant plant = benchmark_plant(PlantKind::sine, b, 1, ystar);
    SimConfig cfg = scalar_config(1.0, 1e-3, 1, 3, 0.7, 0.0);
    const Path path = simulate_path(plant, Gains{2, 3}, cfg, 0);
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        EXPECT_EQ(path.x1[k](0), 0.7);
        EXPECT_EQ(path.x2[k](0), 0.0);
    }
}

TEST(SimulatePath, NoiselessPathTracksDeterministicReference) {
    // g = 0: Euler-Maruyama reduces to Euler; compare against rk4 of the loop
    const LinearPlant plant = scalar_plant(0, 0, 0, 0, 0);
    const Gains g{1, 2};
    const double dt = 1e-3, horizon = 2.0;
    const Path path = simulate_path(plant, g, scalar_config(horizon, dt, 1, 9, 1.0, 1.0), 0);

    Eigen::Vector2d z(1.0, 1.0);
    const auto rhs = [&](const Eigen::Vector2d& v) { return Eigen::Vector2d(v(1), -g.kp * v(0) - g.kd * v(1)); };
    double max_err = 0.0;
    for (std::size_t k = 1; k < path.times.size(); ++k) {
        const Eigen::Vector2d k1 = rhs(z), k2 = rhs(z + 0.5 * dt * k1), k3 = rhs(z + 0.5 * dt * k2),
                              k4 = rhs(z + dt * k3);
        z += (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
        max_err = std::max(max_err, std::abs(path.x1[k](0) - z(0)));
        max_err = std::max(max_err, std::abs(path.x2[k](0) - z(1)));
    }
    EXPECT_LT(max_err, 10.0 * dt);
}

TEST(SimulatePath, SharedScalarDriverAcrossComponents) {
    // identical components stay bit-identical only because every component
    // sees the same Brownian increment
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.3};
    const NonlinearPlant plant = benchmark_plant(PlantKind::sine, b, 2, Eigen::VectorXd::Zero(2));
    SimConfig cfg;
    cfg.horizon = 2.0;
    cfg.dt = 1e-3;
    cfg.trials = 1;
    cfg.master_seed = 17;
    cfg.x1_0 = Eigen::VectorXd::Constant(2, 0.8);
    cfg.x2_0 = Eigen::VectorXd::Constant(2, -0.3);
    const Path path = simulate_path(plant, Gains{2, 3}, cfg, 0);
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        EXPECT_EQ(path.x1[k](0), path.x1[k](1));
        EXPECT_EQ(path.x2[k](0), path.x2[k](1));
    }
}

TEST(EstimateMs, SingleTrialIsDegenerate) {
    const LinearPlant plant = scalar_plant(0, 0, 0.2, 0.1, 0);
    const MsEstimate est = estimate_ms(plant, Gains{1, 2}, scalar_config(0.5, 1e-3, 1, 23, 1.0, 0.0));
    EXPECT_TRUE(est.degenerate);
    for (const double se : est.std_err) EXPECT_EQ(se, 0.0);
}

TEST(EstimateMs, SchedulingIndependentReduction) {
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.3};
    const NonlinearPlant plant = benchmark_plant(PlantKind::sine, b, 1, Eigen::VectorXd::Zero(1));
    const SimConfig cfg = scalar_config(0.5, 1e-3, 100, 29, 1.0, 0.5);
    const MsEstimate a = estimate_ms(plant, Gains{2, 3}, cfg, 1);
    const MsEstimate c = estimate_ms(plant, Gains{2, 3}, cfg, 4);
    ASSERT_EQ(a.mean_sq.size(), c.mean_sq.size());
    for (std::size_t k = 0; k < a.mean_sq.size(); ++k) {
        EXPECT_EQ(a.mean_sq[k], c.mean_sq[k]);
        EXPECT_EQ(a.std_err[k], c.std_err[k]);
    }
}

TEST(EstimateMs, MatchesMomentOdeWithinConfidenceBand) {
    // noisy scalar instance: a0 = -1, b0 = -1.6, c0 = 0.25, d0 = 0.15
    const LinearPlant plant = scalar_plant(0, 0, 0.25, 0.15, 0);
    const Gains g{1.0, 1.6};
    const SimConfig cfg = scalar_config(2.0, 1e-3, 2000, 31, 1.0, 1.0);
    const MsEstimate est = estimate_ms(plant, g, cfg, 2);

    Eigen::MatrixXd p0(2, 2);
    p0 << 1, 1, 1, 1;
    const moments::MomentTrajectory ode = moments::propagate(closed_loop(plant, g), p0, 2.0, 1e-3);
    ASSERT_EQ(ode.states.size(), est.mean_sq.size());

    std::size_t within = 0;
    for (std::size_t k = 0; k < est.mean_sq.size(); ++k) {
        const double band = 3.0 * est.std_err[k];
        if (std::abs(est.mean_sq[k] - ode.states[k].p.trace()) <= band || k == 0) ++within;
    }
    EXPECT_GE(static_cast<double>(within) / est.mean_sq.size(), 0.9);
}

TEST(EstimateMs, UnstableCornerBlowsUpOrFailsToDecay) {
    const Bounds b{1, 1, 1, 1, 1}; // U = 12
    const LinearPlant corner = corner_plant(b, 1);
    const SimConfig cfg = scalar_config(5.0, 1e-3, 64, 37, 1.0, 1.0);
    try {
        const MsEstimate est = estimate_ms(corner, Gains{2.5, 1.5}, cfg);
        const bool failing = est.blowups > 0 || convergence_verdict(est, 1e-2, 0.2) == McVerdict::not_converged;
        EXPECT_TRUE(failing);
    } catch (const BlowupError&) {
        SUCCEED();
    }
}

TEST(EstimateMs, WeakErrorShrinksWithStep) {
    const LinearPlant plant = scalar_plant(0, 0, 0.25, 0.15, 0);
    const Gains g{1.0, 1.6};
    Eigen::MatrixXd p0(2, 2);
    p0 << 1, 1, 1, 1;

    double prev_err = 0.0, prev_se = 0.0;
    bool first = true;
    for (const double dt : {2e-2, 1e-2, 5e-3}) {
        const SimConfig cfg = scalar_config(1.0, dt, 30000, 41, 1.0, 1.0);
        const MsEstimate est = estimate_ms(plant, g, cfg, 2);
        const moments::MomentTrajectory ode = moments::propagate(closed_loop(plant, g), p0, 1.0, dt);
        const double err = std::abs(est.mean_sq.back() - ode.states.back().p.trace());
        const double se = est.std_err.back();
        if (!first) EXPECT_LE(err, prev_err + 2.0 * (se + prev_se));
        prev_err = err;
        prev_se = se;
        first = false;
    }
}

TEST(ConvergenceVerdict, ThresholdAndDegenerateBase) {
    const LinearPlant plant = scalar_plant(0, 0, 0.2, 0.1, 0);
    const MsEstimate est = estimate_ms(plant, Gains{1, 2}, scalar_config(5.0, 1e-3, 16, 43, 1.0, 1.0));
    EXPECT_EQ(convergence_verdict(est, 2.0, 0.2), McVerdict::converged); // threshold above 1 dominates

    // start at the equilibrium: mean_sq(0) = 0, absolute threshold applies
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.3};
    const NonlinearPlant sine = benchmark_plant(PlantKind::sine, b, 1, Eigen::VectorXd::Zero(1));
    const MsEstimate at_eq = estimate_ms(sine, Gains{2, 3}, scalar_config(0.5, 1e-3, 4, 47, 0.0, 0.0));
    EXPECT_EQ(convergence_verdict(at_eq, 1e-9, 0.2), McVerdict::converged);
}

TEST(ConvergenceVerdict, MarginalLoopDoesNotRegulate) {
    // derivative-only feedback never moves x1 to the setpoint
    const LinearPlant plant = scalar_plant(0, 0, 0, 0, 0);
    const MsEstimate est = estimate_ms(plant, Gains{0, 2}, scalar_config(10.0, 1e-3, 4, 53, 1.0, 0.0));
    EXPECT_EQ(convergence_verdict(est, 1e-2, 0.2), McVerdict::not_converged);
}

TEST(Proposition1, OffsetShiftsTheLimit) {
    const SimConfig cfg = scalar_config(25.0, 1e-3, 1, 59, 0.0, 0.0);
    const Prop1Report rep = proposition1_demo(Eigen::VectorXd::Constant(1, 1.0), Gains{1, 2}, cfg);
    EXPECT_NEAR(rep.expected_error_sq, 1.0, 1e-15);
    EXPECT_NEAR(rep.tail_error_sq, 1.0, 0.02);

    const Prop1Report quarter = proposition1_demo(Eigen::VectorXd::Constant(1, 2.0), Gains{4, 3}, cfg);
    EXPECT_NEAR(quarter.expected_error_sq, 0.25, 1e-15);
    EXPECT_NEAR(quarter.tail_error_sq, 0.25, 0.02 * 0.25);
}

TEST(Proposition1, ZeroOffsetRestoresConvergence) {
    const SimConfig cfg = scalar_config(20.0, 1e-3, 1, 61, 1.0, 1.0);
    const Prop1Report rep = proposition1_demo(Eigen::VectorXd::Zero(1), Gains{1, 2}, cfg);
    EXPECT_LT(rep.tail_error_sq, 1e-6);
    EXPECT_EQ(convergence_verdict(rep.estimate, 1e-2, 0.2), McVerdict::converged);
}

TEST(Proposition1, RequiresStabilizingGains) {
    const SimConfig cfg = scalar_config(1.0, 1e-3, 1, 67, 0.0, 0.0);
    EXPECT_THROW(proposition1_demo(Eigen::VectorXd::Constant(1, 1.0), Gains{0, 1}, cfg), std::invalid_argument);
}
