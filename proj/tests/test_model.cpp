#include <gtest/gtest.h>

#include "pdstab/plants.hpp"
#include "pdstab/types.hpp"
#include "test_util.hpp"

using namespace pdstab;

TEST(DerivedScalars, UncertaintyMeasure) {
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.5};
    EXPECT_NEAR(uncertainty_measure(b), 0.225, 1e-15);
    const DerivedScalars s = derived_scalars(b, Gains{1.0, 1.0});
    EXPECT_NEAR(s.u, 0.225, 1e-15);
}

TEST(DerivedScalars, NoInputNoiseZeroesEveryMTerm) {
    const Bounds b{0.3, 0.7, 0.2, 0.9, 0.0};
    const DerivedScalars s = derived_scalars(b, Gains{4.0, 7.0});
    EXPECT_EQ(s.t1, b.n1);
    EXPECT_EQ(s.t2, b.n2);
    EXPECT_EQ(s.u, 0.0);
}

TEST(DerivedScalars, CandidatePointValues) {
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.5};
    const DerivedScalars s = derived_scalars(b, Gains{6.6, 3.8});
    EXPECT_NEAR(s.t1, 3.4, 1e-12);
    EXPECT_NEAR(s.t2, 2.0, 1e-12);
    EXPECT_NEAR(s.kbar1, 6.5, 1e-12);
    EXPECT_NEAR(s.kbar2, 3.7, 1e-12);
    EXPECT_NEAR(s.kbar, 0.2 * 10.4, 1e-12);
}

TEST(DerivedScalars, PureFunction) {
    const Bounds b = testutil::random_bounds(7, 0);
    const Gains g = testutil::random_gains(7, 0);
    const DerivedScalars s1 = derived_scalars(b, g);
    const DerivedScalars s2 = derived_scalars(b, g);
    EXPECT_EQ(s1.kbar, s2.kbar);
    EXPECT_EQ(s1.kbar1, s2.kbar1);
    EXPECT_EQ(s1.kbar2, s2.kbar2);
    EXPECT_EQ(s1.t1, s2.t1);
    EXPECT_EQ(s1.t2, s2.t2);
    EXPECT_EQ(s1.u, s2.u);
}

TEST(Bounds, Validation) {
    EXPECT_NO_THROW((Bounds{1, 1, 1, 1, 0}).validate());
    EXPECT_THROW((Bounds{0, 1, 1, 1, 0}).validate(), std::invalid_argument);
    EXPECT_THROW((Bounds{1, 1, 1, 1, -0.1}).validate(), std::invalid_argument);
}

TEST(SpectralNorm, BasicCases) {
    EXPECT_DOUBLE_EQ(spectral_norm(Eigen::MatrixXd::Zero(3, 3)), 0.0);
    EXPECT_DOUBLE_EQ(spectral_norm(Eigen::MatrixXd::Identity(4, 4)), 1.0);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 0.25;
    d(1, 1) = -0.25;
    EXPECT_NEAR(spectral_norm(d), 0.25, 1e-14);
}

TEST(ClosedLoop, ZeroPlant) {
    const LinearPlant p = scalar_plant(0, 0, 0, 0, 0);
    const ClosedLoopLinear cl = closed_loop(p, Gains{1.0, 2.0});
    EXPECT_DOUBLE_EQ(cl.a0(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(cl.b0(0, 0), -2.0);
    EXPECT_DOUBLE_EQ(cl.c0(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(cl.d0(0, 0), 0.0);
}

TEST(ClosedLoop, CornerCoefficients) {
    const LinearPlant p = scalar_plant(0.1, 0.1, -0.1, -0.1, 0.5);
    const ClosedLoopLinear cl = closed_loop(p, Gains{1.0, 1.0});
    EXPECT_NEAR(cl.c0(0, 0), -0.6, 1e-15);
    EXPECT_NEAR(cl.d0(0, 0), -0.6, 1e-15);
}

TEST(ClosedLoop, BlockStructure) {
    LinearPlant p;
    p.a = p.b = p.c = p.d = p.e = Eigen::MatrixXd::Zero(2, 2);
    const ClosedLoopLinear cl = closed_loop(p, Gains{1.0, 1.0});
    Eigen::MatrixXd expected(4, 4);
    expected << 0, 0, 1, 0,
                0, 0, 0, 1,
               -1, 0, -1, 0,
                0, -1, 0, -1;
    EXPECT_EQ(cl.drift, expected);
    EXPECT_TRUE(cl.diffusion.isZero(0.0));
}

TEST(ClosedLoop, ReassemblyIsIdempotent) {
    const Bounds b = testutil::random_bounds(11, 3);
    const LinearPlant p = testutil::random_inbounds_plant(b, 3, 11, 3);
    const ClosedLoopLinear cl = closed_loop(p, Gains{2.0, 3.0});
    const ClosedLoopLinear again = assemble_closed_loop(cl.a0, cl.b0, cl.c0, cl.d0);
    EXPECT_EQ(cl.drift, again.drift);
    EXPECT_EQ(cl.diffusion, again.diffusion);
}

TEST(ClosedLoop, DimensionMismatchThrows) {
    LinearPlant p = scalar_plant(0, 0, 0, 0, 0);
    p.b = Eigen::MatrixXd::Zero(2, 2);
    EXPECT_THROW(closed_loop(p, Gains{1.0, 1.0}), std::invalid_argument);
}

TEST(ValidatePlant, ZeroMatricesPass) {
    LinearPlant p;
    p.a = p.b = p.c = p.d = p.e = Eigen::MatrixXd::Zero(2, 2);
    const PlantValidation v = validate_linear_plant(p, Bounds{0.3, 0.3, 0.3, 0.3, 0.1});
    EXPECT_TRUE(v.pass);
    for (const auto& c : v.checks) EXPECT_DOUBLE_EQ(c.norm, 0.0);
}

TEST(ValidatePlant, StrictExceedanceFails) {
    const Bounds b{0.3, 0.3, 0.3, 0.3, 0.1};
    const LinearPlant p = scalar_plant(b.l1 + 0.01, 0, 0, 0, 0);
    const PlantValidation v = validate_linear_plant(p, b);
    EXPECT_FALSE(v.pass);
    EXPECT_FALSE(v.checks[0].ok);
    for (int i = 1; i < 5; ++i) EXPECT_TRUE(v.checks[i].ok);
}

TEST(ValidatePlant, DiagonalNormIsLargestMagnitude) {
    const Bounds b{0.25, 0.3, 0.3, 0.3, 0.1};
    LinearPlant p;
    p.a = Eigen::MatrixXd::Zero(2, 2);
    p.a(0, 0) = b.l1;
    p.a(1, 1) = -b.l1;
    p.b = p.c = p.d = p.e = Eigen::MatrixXd::Zero(2, 2);
    const PlantValidation v = validate_linear_plant(p, b);
    EXPECT_TRUE(v.pass);
    EXPECT_NEAR(v.checks[0].norm, b.l1, 1e-14);
}

TEST(BenchmarkPlant, SineVanishesAtSetpoint) {
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.5};
    const Eigen::VectorXd ystar = Eigen::VectorXd::Constant(3, 0.7);
    const NonlinearPlant p = benchmark_plant(PlantKind::sine, b, 3, ystar);
    const EquilibriumCheck eq = check_equilibrium(p);
    EXPECT_TRUE(eq.ok);
    EXPECT_DOUBLE_EQ(eq.f_norm, 0.0);
    EXPECT_DOUBLE_EQ(eq.g_norm, 0.0);
}

TEST(BenchmarkPlant, CornerLinearHitsBoundsExactly) {
    // dyadic bounds keep the norms bit-exact at the boundary
    const Bounds b{0.125, 0.25, 0.5, 0.25, 0.5};
    const PlantValidation v = validate_linear_plant(corner_plant(b, 2), b);
    EXPECT_TRUE(v.pass);
    EXPECT_DOUBLE_EQ(v.checks[0].norm, b.l1);
    EXPECT_DOUBLE_EQ(v.checks[4].norm, b.m);
}

TEST(BenchmarkPlant, OffsetBreaksEquilibrium) {
    PlantParams params;
    params.delta = Eigen::VectorXd::Constant(1, 1.0);
    const NonlinearPlant p = benchmark_plant(PlantKind::offset_equilibrium, Bounds{1, 1, 1, 1, 0}, 1,
                                             Eigen::VectorXd::Zero(1), params);
    const EquilibriumCheck eq = check_equilibrium(p);
    EXPECT_FALSE(eq.ok);
    EXPECT_DOUBLE_EQ(eq.f_norm, 1.0);
    EXPECT_DOUBLE_EQ(eq.g_norm, 0.0);
}

TEST(BenchmarkPlant, SampledJacobiansRespectBounds) {
    const Bounds b{0.1, 0.1, 0.1, 0.1, 0.5};
    const Eigen::VectorXd ystar = Eigen::VectorXd::Constant(2, 0.3);
    for (const PlantKind kind : {PlantKind::sine, PlantKind::nonaffine_sine}) {
        const NonlinearPlant p = benchmark_plant(kind, b, 2, ystar);
        const JacobianCheck jc = check_jacobian_bounds(p, 1000, 42);
        EXPECT_TRUE(jc.within_bounds);
        EXPECT_TRUE(jc.control_gain_ok);
        EXPECT_LE(jc.max_dg_du, b.m + 1e-4);
        EXPECT_GE(jc.min_eig_df_du, 1.0 - 1e-4);
    }
}

TEST(BenchmarkPlant, CornerLinearJacobiansSitAtBounds) {
    const Bounds b{0.4, 0.2, 0.3, 0.6, 0.25};
    const NonlinearPlant p = benchmark_plant(PlantKind::corner_linear, b, 2, Eigen::VectorXd::Zero(2));
    const JacobianCheck jc = check_jacobian_bounds(p, 50, 9);
    EXPECT_TRUE(jc.within_bounds);
    EXPECT_NEAR(jc.max_df_dx1, b.l1, 1e-6);
    EXPECT_NEAR(jc.max_dg_dx2, b.n2, 1e-6);
    EXPECT_NEAR(jc.max_dg_du, b.m, 1e-6);
}

TEST(BenchmarkPlant, AsNonlinearMatchesLinearOperators) {
    const Bounds b = testutil::random_bounds(13, 1);
    const LinearPlant lin = testutil::random_inbounds_plant(b, 2, 13, 1);
    const NonlinearPlant p = as_nonlinear(lin, Eigen::VectorXd::Zero(2));
    const Eigen::VectorXd x1 = Eigen::VectorXd::Constant(2, 0.5);
    const Eigen::VectorXd x2 = Eigen::VectorXd::Constant(2, -0.2);
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(2, 0.9);
    EXPECT_LT((p.f(x1, x2, u) - (lin.a * x1 + lin.b * x2 + u)).norm(), 1e-14);
    EXPECT_LT((p.g(x1, x2, u) - (lin.c * x1 + lin.d * x2 + lin.e * u)).norm(), 1e-14);
}
