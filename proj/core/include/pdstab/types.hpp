#pragma once

namespace pdstab {

// Uniform spectral-norm bounds on the Jacobians of the drift f and the
// diffusion g of the plant:
//   ||df/dx1|| <= l1, ||df/dx2|| <= l2,
//   ||dg/dx1|| <= n1, ||dg/dx2|| <= n2, ||dg/du|| <= m.
// l1, l2, n1, n2 must be positive; m may be zero (diffusion independent
// of the input).
struct Bounds {
    double l1;
    double l2;
    double n1;
    double n2;
    double m;

    // Throws std::invalid_argument when a field violates its sign constraint.
    void validate() const;
};

// PD gain pair for u = kp*e + kd*de/dt. Positivity is imposed by the region
// predicates, not here.
struct Gains {
    double kp;
    double kd;
};

// Scalars the gain-region inequalities and certificates are written in.
struct DerivedScalars {
    double kbar;   // (l1 + l2) * (kp + kd)
    double kbar1;  // kp - l1
    double kbar2;  // kd - l2
    double t1;     // n1 + m * kp
    double t2;     // n2 + m * kd
    double u;      // 4*l1*m^4 + 4*n1*m^3 + 2*l2*m^2 + 2*n2*m, bounds only
};

DerivedScalars derived_scalars(const Bounds& bounds, const Gains& gains);

// The uncertainty measure U. The linear plant class is PD-stabilizable
// exactly when U < 1.
double uncertainty_measure(const Bounds& bounds);

} // namespace pdstab
