#include "pdstab/types.hpp"

#include <cmath>
#include <stdexcept>

namespace pdstab {

void Bounds::validate() const {
    if (!(l1 > 0.0) || !std::isfinite(l1)) throw std::invalid_argument("bounds: l1 must be positive");
    if (!(l2 > 0.0) || !std::isfinite(l2)) throw std::invalid_argument("bounds: l2 must be positive");
    if (!(n1 > 0.0) || !std::isfinite(n1)) throw std::invalid_argument("bounds: n1 must be positive");
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw std::invalid_argument("bounds: n2 must be positive");
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("bounds: m must be nonnegative");
}

double uncertainty_measure(const Bounds& b) {
    const double m2 = b.m * b.m;
    return 4.0 * b.l1 * m2 * m2 + 4.0 * b.n1 * m2 * b.m + 2.0 * b.l2 * m2 + 2.0 * b.n2 * b.m;
}

DerivedScalars derived_scalars(const Bounds& b, const Gains& g) {
    DerivedScalars s;
    s.kbar = (b.l1 + b.l2) * (g.kp + g.kd);
    s.kbar1 = g.kp - b.l1;
    s.kbar2 = g.kd - b.l2;
    s.t1 = b.n1 + b.m * g.kp;
    s.t2 = b.n2 + b.m * g.kd;
    s.u = uncertainty_measure(b);
    return s;
}

} // namespace pdstab
