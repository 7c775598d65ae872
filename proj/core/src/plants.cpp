#include "pdstab/plants.hpp"

#include <cmath>
#include <stdexcept>

#include "pdstab/rng.hpp"

namespace pdstab {

double spectral_norm(const Eigen::MatrixXd& p) {
    if (p.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.transpose() * p, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lmax));
}

LinearPlant scalar_plant(double a, double b, double c, double d, double e) {
    LinearPlant p;
    p.a = Eigen::MatrixXd::Constant(1, 1, a);
    p.b = Eigen::MatrixXd::Constant(1, 1, b);
    p.c = Eigen::MatrixXd::Constant(1, 1, c);
    p.d = Eigen::MatrixXd::Constant(1, 1, d);
    p.e = Eigen::MatrixXd::Constant(1, 1, e);
    return p;
}

LinearPlant corner_plant(const Bounds& bounds, Eigen::Index n) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    LinearPlant p;
    p.a = bounds.l1 * id;
    p.b = bounds.l2 * id;
    p.c = -bounds.n1 * id;
    p.d = -bounds.n2 * id;
    p.e = bounds.m * id;
    return p;
}

static void require_square_same(const LinearPlant& p) {
    const Eigen::Index n = p.a.rows();
    for (const Eigen::MatrixXd* mat : {&p.a, &p.b, &p.c, &p.d, &p.e}) {
        if (mat->rows() != n || mat->cols() != n)
            throw std::invalid_argument("linear plant: all five matrices must be square of equal dimension");
    }
    if (n < 1) throw std::invalid_argument("linear plant: dimension must be at least 1");
}

PlantValidation validate_linear_plant(const LinearPlant& plant, const Bounds& bounds) {
    require_square_same(plant);
    PlantValidation v;
    const std::array<const Eigen::MatrixXd*, 5> mats = {&plant.a, &plant.b, &plant.c, &plant.d, &plant.e};
    const std::array<const char*, 5> names = {"a", "b", "c", "d", "e"};
    const std::array<double, 5> lims = {bounds.l1, bounds.l2, bounds.n1, bounds.n2, bounds.m};
    v.pass = true;
    for (int i = 0; i < 5; ++i) {
        const double norm = spectral_norm(*mats[i]);
        const bool ok = norm <= lims[i];
        v.checks[i] = MatrixCheck{names[i], norm, lims[i], ok};
        v.pass = v.pass && ok;
    }
    return v;
}

ClosedLoopLinear closed_loop(const LinearPlant& plant, const Gains& gains) {
    require_square_same(plant);
    const Eigen::Index n = plant.n();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    return assemble_closed_loop(plant.a - gains.kp * id, plant.b - gains.kd * id,
                                plant.c - gains.kp * plant.e, plant.d - gains.kd * plant.e);
}

ClosedLoopLinear assemble_closed_loop(const Eigen::MatrixXd& a0, const Eigen::MatrixXd& b0,
                                      const Eigen::MatrixXd& c0, const Eigen::MatrixXd& d0) {
    const Eigen::Index n = a0.rows();
    if (b0.rows() != n || c0.rows() != n || d0.rows() != n ||
        a0.cols() != n || b0.cols() != n || c0.cols() != n || d0.cols() != n)
        throw std::invalid_argument("closed loop: coefficient blocks must be square of equal dimension");

    ClosedLoopLinear cl;
    cl.a0 = a0;
    cl.b0 = b0;
    cl.c0 = c0;
    cl.d0 = d0;
    cl.drift = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    cl.drift.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    cl.drift.bottomLeftCorner(n, n) = a0;
    cl.drift.bottomRightCorner(n, n) = b0;
    cl.diffusion = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    cl.diffusion.bottomLeftCorner(n, n) = c0;
    cl.diffusion.bottomRightCorner(n, n) = d0;
    return cl;
}

NonlinearPlant as_nonlinear(const LinearPlant& plant, const Eigen::VectorXd& ystar) {
    require_square_same(plant);
    if (ystar.size() != plant.n())
        throw std::invalid_argument("as_nonlinear: ystar dimension mismatch");
    NonlinearPlant p;
    p.n = plant.n();
    p.ystar = ystar;
    p.declared_bounds = Bounds{spectral_norm(plant.a), spectral_norm(plant.b), spectral_norm(plant.c),
                               spectral_norm(plant.d), spectral_norm(plant.e)};
    const Eigen::MatrixXd a = plant.a, b = plant.b, e = plant.e;
    const Eigen::MatrixXd c = plant.c, d = plant.d;
    p.f = [a, b, ystar](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const Eigen::VectorXd& u) {
        return (a * (x1 - ystar) + b * x2 + u).eval();
    };
    p.g = [c, d, e, ystar](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const Eigen::VectorXd& u) {
        return (c * (x1 - ystar) + d * x2 + e * u).eval();
    };
    return p;
}

NonlinearPlant benchmark_plant(PlantKind kind, const Bounds& bounds, Eigen::Index n,
                               const Eigen::VectorXd& ystar, const PlantParams& params) {
    if (n < 1) throw std::invalid_argument("benchmark_plant: n must be at least 1");
    if (ystar.size() != n) throw std::invalid_argument("benchmark_plant: ystar dimension mismatch");

    NonlinearPlant p;
    p.n = n;
    p.ystar = ystar;
    p.declared_bounds = bounds;
    const double l1 = bounds.l1, l2 = bounds.l2, n1 = bounds.n1, n2 = bounds.n2, m = bounds.m;

    const auto sines_g = [n1, n2, m, ystar](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                            const Eigen::VectorXd& u) {
        return (n1 * (x1 - ystar).array().sin() + n2 * x2.array().sin() + m * u.array().sin()).matrix().eval();
    };

    switch (kind) {
    case PlantKind::sine:
        p.f = [l1, l2, ystar](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const Eigen::VectorXd& u) {
            return ((l1 * (x1 - ystar).array().sin() + l2 * x2.array().sin()).matrix() + u).eval();
        };
        p.g = sines_g;
        break;
    case PlantKind::nonaffine_sine: {
        if (!(params.eps >= 0.0)) throw std::invalid_argument("benchmark_plant: eps must be nonnegative");
        const double eps = params.eps;
        p.f = [l1, l2, eps, ystar](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const Eigen::VectorXd& u) {
            return ((l1 * (x1 - ystar).array().sin() + l2 * x2.array().sin()).matrix() + u +
                    eps * (u + u.array().sin().matrix()))
                .eval();
        };
        p.g = sines_g;
        break;
    }
    case PlantKind::corner_linear:
        p.f = [l1, l2, ystar](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const Eigen::VectorXd& u) {
            return (l1 * (x1 - ystar) + l2 * x2 + u).eval();
        };
        p.g = [n1, n2, m, ystar](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const Eigen::VectorXd& u) {
            return (-n1 * (x1 - ystar) - n2 * x2 + m * u).eval();
        };
        break;
    case PlantKind::offset_equilibrium: {
        Eigen::VectorXd delta = params.delta;
        if (delta.size() == 0) delta = Eigen::VectorXd::Ones(n);
        if (delta.size() != n) throw std::invalid_argument("benchmark_plant: delta dimension mismatch");
        p.f = [delta](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd& u) {
            return (delta + u).eval();
        };
        p.g = [n](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&) {
            return Eigen::VectorXd::Zero(n).eval();
        };
        break;
    }
    default:
        throw std::invalid_argument("benchmark_plant: unknown kind");
    }
    return p;
}

EquilibriumCheck check_equilibrium(const NonlinearPlant& plant, double tol) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(plant.n);
    EquilibriumCheck c;
    c.f_norm = plant.f(plant.ystar, zero, zero).norm();
    c.g_norm = plant.g(plant.ystar, zero, zero).norm();
    c.ok = c.f_norm <= tol && c.g_norm <= tol;
    return c;
}

namespace {

using PlantMap =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)>;

// Central-difference Jacobian of `map` in its `arg`-th argument (0:x1, 1:x2, 2:u).
Eigen::MatrixXd fd_jacobian(const PlantMap& map, int arg, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                            const Eigen::VectorXd& u, double step) {
    const Eigen::Index n = x1.size();
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd a1 = x1, a2 = x2, au = u;
    Eigen::VectorXd* target = arg == 0 ? &a1 : arg == 1 ? &a2 : &au;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double base = (*target)(j);
        (*target)(j) = base + step;
        const Eigen::VectorXd fp = map(a1, a2, au);
        (*target)(j) = base - step;
        const Eigen::VectorXd fm = map(a1, a2, au);
        (*target)(j) = base;
        jac.col(j) = (fp - fm) / (2.0 * step);
    }
    return jac;
}

} // namespace

JacobianCheck check_jacobian_bounds(const NonlinearPlant& plant, int points, std::uint64_t seed, double step,
                                    double tol) {
    if (points < 1) throw std::invalid_argument("check_jacobian_bounds: need at least one point");
    const Eigen::Index n = plant.n;

    JacobianCheck r{};
    r.min_eig_df_du = std::numeric_limits<double>::infinity();

    std::uint64_t draw = 0;
    for (int k = 0; k < points; ++k) {
        Eigen::VectorXd x1(n), x2(n), u(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x1(i) = 3.0 * gaussian_draw(seed, k, draw++);
            x2(i) = 3.0 * gaussian_draw(seed, k, draw++);
            u(i) = 3.0 * gaussian_draw(seed, k, draw++);
        }
        r.max_df_dx1 = std::max(r.max_df_dx1, spectral_norm(fd_jacobian(plant.f, 0, x1, x2, u, step)));
        r.max_df_dx2 = std::max(r.max_df_dx2, spectral_norm(fd_jacobian(plant.f, 1, x1, x2, u, step)));
        r.max_dg_dx1 = std::max(r.max_dg_dx1, spectral_norm(fd_jacobian(plant.g, 0, x1, x2, u, step)));
        r.max_dg_dx2 = std::max(r.max_dg_dx2, spectral_norm(fd_jacobian(plant.g, 1, x1, x2, u, step)));
        r.max_dg_du = std::max(r.max_dg_du, spectral_norm(fd_jacobian(plant.g, 2, x1, x2, u, step)));

        const Eigen::MatrixXd dfdu = fd_jacobian(plant.f, 2, x1, x2, u, step);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (dfdu + dfdu.transpose()), Eigen::EigenvaluesOnly);
        r.min_eig_df_du = std::min(r.min_eig_df_du, es.eigenvalues().minCoeff());
    }

    const Bounds& b = plant.declared_bounds;
    r.within_bounds = r.max_df_dx1 <= b.l1 + tol && r.max_df_dx2 <= b.l2 + tol && r.max_dg_dx1 <= b.n1 + tol &&
                      r.max_dg_dx2 <= b.n2 + tol && r.max_dg_du <= b.m + tol;
    r.control_gain_ok = r.min_eig_df_du >= 1.0 - tol;
    return r;
}

} // namespace pdstab
