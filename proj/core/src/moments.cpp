#include "pdstab/moments.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

#include "pdstab/certificates.hpp"

namespace pdstab::moments {

namespace {

constexpr double kBlowupFactor = 1e12;

Eigen::MatrixXd lyapunov_rhs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& p) {
    return a * p + p * a.transpose() + b * p * b.transpose();
}

} // namespace

MomentTrajectory propagate(const ClosedLoopLinear& cl, const Eigen::MatrixXd& p0, double horizon, double dt,
                           Method method) {
    const Eigen::Index dim = 2 * cl.n();
    if (p0.rows() != dim || p0.cols() != dim)
        throw std::invalid_argument("propagate: p0 must be 2n x 2n");
    if (!(dt > 0.0) || !(horizon >= dt))
        throw std::invalid_argument("propagate: need dt > 0 and horizon >= dt");
    if ((p0 - p0.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("propagate: p0 must be symmetric");

    const long nsteps = std::max<long>(1, std::llround(horizon / dt));

    MomentTrajectory traj;
    traj.dt = dt;
    traj.method = method;
    traj.states.reserve(static_cast<std::size_t>(nsteps) + 1);

    Eigen::MatrixXd p = 0.5 * (p0 + p0.transpose());
    traj.states.push_back({0.0, p});
    const double trace0 = p.trace();
    const double limit = kBlowupFactor * std::max(trace0, 1.0);

    Eigen::MatrixXd stepper; // expm only
    if (method == Method::expm) {
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
        const Eigen::MatrixXd gen = Eigen::kroneckerProduct(id, cl.drift) +
                                    Eigen::kroneckerProduct(cl.drift, id) +
                                    Eigen::kroneckerProduct(cl.diffusion, cl.diffusion);
        stepper = (gen * dt).exp();
    }

    for (long k = 1; k <= nsteps; ++k) {
        if (method == Method::rk4) {
            const Eigen::MatrixXd k1 = lyapunov_rhs(cl.drift, cl.diffusion, p);
            const Eigen::MatrixXd k2 = lyapunov_rhs(cl.drift, cl.diffusion, p + 0.5 * dt * k1);
            const Eigen::MatrixXd k3 = lyapunov_rhs(cl.drift, cl.diffusion, p + 0.5 * dt * k2);
            const Eigen::MatrixXd k4 = lyapunov_rhs(cl.drift, cl.diffusion, p + dt * k3);
            p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            Eigen::Map<Eigen::VectorXd> v(p.data(), p.size());
            v = (stepper * v).eval();
        }
        p = 0.5 * (p + p.transpose()).eval();

        const double tr = p.trace();
        const double t = static_cast<double>(k) * dt;
        if (!std::isfinite(tr) || tr > limit) {
            traj.blew_up = true;
            traj.blowup_time = t;
            break;
        }
        traj.states.push_back({t, p});
    }
    return traj;
}

ScalarMomentTrajectory propagate_scalar(double a0, double b0, double c0, double d0,
                                        const std::array<double, 3>& start, double horizon, double dt,
                                        Method method) {
    if (!(dt > 0.0) || !(horizon >= dt))
        throw std::invalid_argument("propagate_scalar: need dt > 0 and horizon >= dt");

    const Eigen::Matrix3d q = certificates::q_matrix(a0, b0, c0, d0);
    const long nsteps = std::max<long>(1, std::llround(horizon / dt));

    ScalarMomentTrajectory traj;
    traj.dt = dt;
    traj.states.reserve(static_cast<std::size_t>(nsteps) + 1);

    Eigen::Vector3d v(start[0], start[1], start[2]);
    traj.states.push_back({0.0, v(0), v(1), v(2)});
    const double limit = kBlowupFactor * std::max(std::abs(v(0)) + std::abs(v(2)), 1.0);

    Eigen::Matrix3d stepper;
    if (method == Method::expm) stepper = (q * dt).exp();

    for (long k = 1; k <= nsteps; ++k) {
        if (method == Method::rk4) {
            const Eigen::Vector3d k1 = q * v;
            const Eigen::Vector3d k2 = q * (v + 0.5 * dt * k1);
            const Eigen::Vector3d k3 = q * (v + 0.5 * dt * k2);
            const Eigen::Vector3d k4 = q * (v + dt * k3);
            v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            v = stepper * v;
        }
        const double t = static_cast<double>(k) * dt;
        const double size = std::abs(v(0)) + std::abs(v(2));
        if (!std::isfinite(size) || size > limit) {
            traj.blew_up = true;
            traj.blowup_time = t;
            break;
        }
        traj.states.push_back({t, v(0), v(1), v(2)});
    }
    return traj;
}

namespace {

// Largest real part of the roots of lambda^3 + a2 lambda^2 + a1 lambda + a0,
// via the depressed cubic. The triple-root case is answered exactly; the
// trigonometric and Cardano branches cover the rest.
double cubic_abscissa(double a2, double a1, double a0) {
    const double shift = a2 / 3.0;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;

    const double scale = std::max({1.0, std::abs(a2), std::sqrt(std::abs(a1)), std::cbrt(std::abs(a0))});
    if (std::abs(p) <= 1e-14 * scale * scale && std::abs(q) <= 1e-14 * scale * scale * scale)
        return -shift; // triple root

    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (disc > 0.0) {
        // three distinct real roots; p < 0 here
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double cos_arg = std::clamp(-4.0 * q / (m * m * m), -1.0, 1.0);
        const double theta = std::acos(cos_arg);
        return m * std::cos(theta / 3.0) - shift;
    }
    // one real root; pick the larger-magnitude cube-root term to avoid cancellation
    const double sq = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    const double w = q > 0.0 ? -q / 2.0 - sq : -q / 2.0 + sq;
    const double t1 = std::cbrt(w);
    const double t2 = t1 != 0.0 ? -p / (3.0 * t1) : 0.0;
    const double real_root = t1 + t2;
    const double pair_real = -real_root / 2.0;
    return std::max(real_root, pair_real) - shift;
}

} // namespace

double spectral_abscissa_scalar(double a0, double b0, double c0, double d0) {
    const certificates::AlphaTriple a = certificates::alpha_coeffs(a0, b0, c0, d0);
    return cubic_abscissa(a.alpha2, a.alpha1, a.alpha0);
}

DecayEstimate decay_rate(const MomentTrajectory& traj, double window) {
    const std::size_t n = traj.states.size();
    if (n < 10) throw std::invalid_argument("decay_rate: need at least 10 samples");
    if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("decay_rate: window must be in (0, 1]");

    const std::size_t count = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(window * n)));
    const std::size_t first = n - count;

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = first; i < n; ++i) {
        const double tr = traj.states[i].p.trace();
        if (!(tr > 0.0)) throw std::domain_error("decay_rate: nonpositive trace in fit window");
        const double t = traj.states[i].t;
        const double y = std::log(tr);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double nn = static_cast<double>(count);
    const double denom = nn * stt - st * st;
    if (denom == 0.0) throw std::domain_error("decay_rate: degenerate fit window");
    const double slope = (nn * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / nn;

    double rss = 0.0;
    for (std::size_t i = first; i < n; ++i) {
        const double resid = std::log(traj.states[i].p.trace()) - (intercept + slope * traj.states[i].t);
        rss += resid * resid;
    }
    return DecayEstimate{slope, std::sqrt(rss / nn)};
}

StabilizationReport stabilization_verdict(const MomentTrajectory& traj, double threshold) {
    if (traj.states.empty()) throw std::invalid_argument("stabilization_verdict: empty trajectory");
    const double tr0 = traj.states.front().p.trace();
    const double trf = traj.blew_up ? std::numeric_limits<double>::infinity() : traj.states.back().p.trace();
    const bool decayed = trf < threshold * tr0;
    return StabilizationReport{decayed ? TraceVerdict::decayed : TraceVerdict::not_decayed, tr0, trf};
}

} // namespace pdstab::moments
