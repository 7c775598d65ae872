#include "pdstab/certificates.hpp"

#include <cmath>
#include <stdexcept>

namespace pdstab::certificates {

Eigen::Matrix3d q_matrix(double a0, double b0, double c0, double d0) {
    Eigen::Matrix3d q;
    q << 0.0, 2.0, 0.0,
         a0, b0, 1.0,
         c0 * c0, 2.0 * (a0 + c0 * d0), 2.0 * b0 + d0 * d0;
    return q;
}

AlphaTriple alpha_coeffs(double a0, double b0, double c0, double d0) {
    AlphaTriple a;
    a.alpha0 = 2.0 * (2.0 * a0 * b0 + a0 * d0 * d0 - c0 * c0);
    a.alpha1 = b0 * d0 * d0 + 2.0 * b0 * b0 - 4.0 * a0 - 2.0 * c0 * d0;
    a.alpha2 = -(3.0 * b0 + d0 * d0);
    return a;
}

bool routh_hurwitz(const AlphaTriple& a) {
    return a.alpha2 > 0.0 && a.alpha0 > 0.0 && a.alpha1 * a.alpha2 > a.alpha0;
}

namespace {
constexpr double kMarginalBand = 1e-10;
}

ScalarStability ms_stable_scalar(const LinearPlant& plant, const Gains& gains) {
    if (plant.n() != 1) throw std::invalid_argument("ms_stable_scalar: plant must be scalar (n = 1)");
    const ClosedLoopLinear cl = closed_loop(plant, gains);
    const AlphaTriple a = alpha_coeffs(cl.a0(0, 0), cl.b0(0, 0), cl.c0(0, 0), cl.d0(0, 0));

    const double q1 = a.alpha2;
    const double q2 = a.alpha0;
    const double q3 = a.alpha1 * a.alpha2 - a.alpha0;
    Verdict v;
    if (std::abs(q1) < kMarginalBand || std::abs(q2) < kMarginalBand || std::abs(q3) < kMarginalBand)
        v = Verdict::marginal;
    else if (q1 > 0.0 && q2 > 0.0 && q3 > 0.0)
        v = Verdict::stable;
    else
        v = Verdict::unstable;
    return ScalarStability{v, a};
}

std::optional<LinearPlant> worst_case_search(const Bounds& bounds, const Gains& gains) {
    // the two plants the necessity argument relies on, then all sign corners
    std::vector<LinearPlant> corners;
    corners.reserve(34);
    corners.push_back(scalar_plant(bounds.l1, bounds.l2, 0.0, 0.0, 0.0));
    corners.push_back(scalar_plant(bounds.l1, bounds.l2, -bounds.n1, -bounds.n2, bounds.m));
    for (int mask = 0; mask < 32; ++mask) {
        const double sa = (mask & 16) ? -1.0 : 1.0;
        const double sb = (mask & 8) ? -1.0 : 1.0;
        const double sc = (mask & 4) ? -1.0 : 1.0;
        const double sd = (mask & 2) ? -1.0 : 1.0;
        const double se = (mask & 1) ? -1.0 : 1.0;
        corners.push_back(
            scalar_plant(sa * bounds.l1, sb * bounds.l2, sc * bounds.n1, sd * bounds.n2, se * bounds.m));
    }
    for (const LinearPlant& p : corners) {
        if (ms_stable_scalar(p, gains).verdict != Verdict::stable) return p;
    }
    return std::nullopt;
}

LyapunovCertificate lyapunov_linear(const Bounds& bounds, const Gains& gains, const LinearPlant& plant) {
    const DerivedScalars s = derived_scalars(bounds, gains);
    if (!(s.kbar1 > 0.0)) throw std::domain_error("lyapunov_linear: kp <= l1 leaves r undefined");

    const ClosedLoopLinear cl = closed_loop(plant, gains);
    const Eigen::Index n = cl.n();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

    LyapunovCertificate cert;
    cert.r = (2.0 * s.kbar1 * s.kbar2 + s.t1 * s.t1 - s.kbar1 * s.t2 * s.t2) / (4.0 * s.kbar1);
    cert.m = -cert.r * cl.b0 - cl.a0.transpose() - cl.c0.transpose() * cl.d0;

    const Eigen::MatrixXd m_sym = 0.5 * (cert.m + cert.m.transpose());
    cert.p = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    cert.p.topLeftCorner(n, n) = m_sym;
    cert.p.topRightCorner(n, n) = cert.r * id;
    cert.p.bottomLeftCorner(n, n) = cert.r * id;
    cert.p.bottomRightCorner(n, n) = id;

    // generator blocks; the coupling block vanishes exactly by the choice of m
    const Eigen::MatrixXd coupling = cert.m + cert.r * cl.b0 + cl.a0.transpose() + cl.c0.transpose() * cl.d0;
    cert.lv = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    cert.lv.topLeftCorner(n, n) = cert.r * (cl.a0 + cl.a0.transpose()) + cl.c0.transpose() * cl.c0;
    cert.lv.topRightCorner(n, n) = coupling;
    cert.lv.bottomLeftCorner(n, n) = coupling.transpose();
    cert.lv.bottomRightCorner(n, n) = 2.0 * cert.r * id + (cl.b0 + cl.b0.transpose()) + cl.d0.transpose() * cl.d0;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(cert.p, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> elv(cert.lv, Eigen::EigenvaluesOnly);
    cert.lambda_min_p = ep.eigenvalues().minCoeff();
    cert.lambda_max_lv = elv.eigenvalues().maxCoeff();
    const double lv_norm = spectral_norm(cert.lv);
    cert.offdiag_rel = lv_norm > 0.0 ? spectral_norm(coupling) / lv_norm : 0.0;
    cert.valid = cert.lambda_min_p > 0.0 && cert.lambda_max_lv < 0.0;
    return cert;
}

double eta_margin(const Bounds& bounds, const Gains& gains) {
    const DerivedScalars s = derived_scalars(bounds, gains);
    const double z1 = gains.kp * gains.kp - s.kbar - gains.kd * s.t1 * s.t1;
    const double z2 = gains.kd * gains.kd - gains.kp - s.kbar - gains.kd * s.t2 * s.t2;
    return std::min(z1, z2);
}

double nonlinear_lyapunov_value(const Gains& gains, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
    if (z1.size() != z2.size()) throw std::invalid_argument("nonlinear_lyapunov_value: dimension mismatch");
    return gains.kp * gains.kd * z1.squaredNorm() + gains.kp * z1.dot(z2) + 0.5 * gains.kd * z2.squaredNorm();
}

} // namespace pdstab::certificates
