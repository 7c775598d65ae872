#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdstab/types.hpp"

namespace pdstab::regions {

enum class RegionId { omega0, omega_prime, omega };

std::string_view region_name(RegionId id);
RegionId region_from_name(std::string_view name);

struct Slack {
    std::string name;
    double value; // constraint left-minus-right; positive means strictly satisfied
};

struct Membership {
    bool member; // true iff every slack is strictly positive
    std::vector<Slack> slacks;

    double min_slack() const;
};

// Exact evaluation of the defining inequalities. The regions are open:
// boundary points are non-members.
//   omega0:      kp > 0, kd > 0, kp^2 > kbar + kd T1^2, kd^2 - kp > kbar + kd T2^2
//   omega_prime: kp > l1, kbar1 kbar2 > T1^2 + kbar1 T2^2
//   omega:       kp > l1, 2 kbar1 kbar2 > T1^2 + kbar1 T2^2
Membership membership(RegionId region, const Bounds& bounds, const Gains& gains);

// Emptiness polynomials in a trial value s of the diffusion-gain bound.
// omega is nonempty iff omega_empty_poly(bounds, m) < 1 (Lemma 1);
// omega_prime iff omega_prime_empty_poly(bounds, m) < 1 (Lemma 2).
double omega_empty_poly(const Bounds& bounds, double s);       // 4 l1 s^4 + 4 n1 s^3 + 2 l2 s^2 + 2 n2 s
double omega_prime_empty_poly(const Bounds& bounds, double s); // 16 l1 s^4 + 16 n1 s^3 + 4 l2 s^2 + 4 n2 s

bool omega_nonempty(const Bounds& bounds);
bool omega_prime_nonempty(const Bounds& bounds);

// Unique positive roots of the monotone emptiness quartics, by bisection to
// full double precision (residual well under 1e-12).
// m0_star: omega_prime (and hence omega0) is empty for m >= m0_star.
// m2_star: the exact stabilizability limit of the linear class.
double m0_star(const Bounds& bounds);
double m2_star(const Bounds& bounds);

// Closed-form gains that lie in omega whenever it is nonempty and m > 0.
Gains candidate_gains(const Bounds& bounds);

struct GainBox {
    double kp_lo, kp_hi;
    double kd_lo, kd_hi;
};

// Rectangle (l1, 4/m^4) x (l2, 2/m^2) that contains the closure of omega.
// Throws UnboundedRegionError when m = 0.
GainBox bounding_box(const Bounds& bounds);

struct Omega0Search {
    bool nonempty;
    Gains witness;  // member point when nonempty
    double margin;  // min omega0 slack at the best point found (<= 0 when empty)
};

// Decides omega0 nonemptiness at diffusion bound m_value by maximizing the
// minimum slack over the bounding box (coarse grid plus local refinement).
// A positive result carries a verified witness; a negative result is
// grid-resolution limited.
Omega0Search omega0_nonempty_at(const Bounds& bounds, double m_value, int threads = 1);

struct M1Bracket {
    double lower;  // omega0 verified nonempty here (witness below)
    double upper;  // search found no member here
    Gains witness;
};

// Brackets the supremum of {m : omega0 nonempty} by bisection, valid by the
// monotone shrinkage of omega0 in m. `tol` is the bracket width.
M1Bracket m1_star(const Bounds& bounds, double tol, int threads = 1);

struct RegionPoint {
    double kp, kd;
    double min_slack;
    bool member;
};

struct GridSpec {
    int nx = 100;
    int ny = 100;
    std::optional<GainBox> box; // defaults to bounding_box, required when m = 0
};

// Evaluates membership on an inclusive nx-by-ny grid, kp varying slowest.
std::vector<RegionPoint> sample_region(RegionId region, const Bounds& bounds, const GridSpec& grid,
                                       int threads = 1);

struct SynthResult {
    Gains gains;
    double margin;
};

// Synthesis failed to find a positive-margin point; carries the best seen.
class SynthError : public std::runtime_error {
public:
    SynthError(const std::string& msg, Gains best, double margin)
        : std::runtime_error(msg), best(best), margin(margin) {}
    Gains best;
    double margin;
};

// Margin-maximizing gain selection: coarse grid over the bounding box, then
// `budget` rounds of local refinement. For omega0 the margin is the decay
// constant eta = min of the two quadratic slacks; for the other regions it is
// the minimum slack. Ties resolve to the lexicographically smallest gains.
SynthResult synth_gains(const Bounds& bounds, RegionId region, int budget = 40, int threads = 1);

struct Thresholds {
    double m0;
    double m2;
    M1Bracket m1;
    double m0_residual;
    double m2_residual;
};

Thresholds thresholds(const Bounds& bounds, double m1_tol = 1e-4, int threads = 1);

} // namespace pdstab::regions
