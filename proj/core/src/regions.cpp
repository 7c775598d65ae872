#include "pdstab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdstab/errors.hpp"
#include "pdstab/parallel.hpp"

namespace pdstab::regions {

std::string_view region_name(RegionId id) {
    switch (id) {
    case RegionId::omega0: return "omega0";
    case RegionId::omega_prime: return "omega_prime";
    case RegionId::omega: return "omega";
    }
    return "?";
}

RegionId region_from_name(std::string_view name) {
    if (name == "omega0") return RegionId::omega0;
    if (name == "omega_prime") return RegionId::omega_prime;
    if (name == "omega") return RegionId::omega;
    throw std::invalid_argument("unknown region: " + std::string(name));
}

double Membership::min_slack() const {
    double v = std::numeric_limits<double>::infinity();
    for (const Slack& s : slacks) v = std::min(v, s.value);
    return v;
}

Membership membership(RegionId region, const Bounds& bounds, const Gains& gains) {
    const DerivedScalars s = derived_scalars(bounds, gains);
    Membership mem;
    switch (region) {
    case RegionId::omega0:
        mem.slacks = {{"kp", gains.kp},
                      {"kd", gains.kd},
                      {"z1_coeff", gains.kp * gains.kp - s.kbar - gains.kd * s.t1 * s.t1},
                      {"z2_coeff", gains.kd * gains.kd - gains.kp - s.kbar - gains.kd * s.t2 * s.t2}};
        break;
    case RegionId::omega_prime:
        mem.slacks = {{"kp_margin", s.kbar1},
                      {"main", s.kbar1 * s.kbar2 - s.t1 * s.t1 - s.kbar1 * s.t2 * s.t2}};
        break;
    case RegionId::omega:
        mem.slacks = {{"kp_margin", s.kbar1},
                      {"main", 2.0 * s.kbar1 * s.kbar2 - s.t1 * s.t1 - s.kbar1 * s.t2 * s.t2}};
        break;
    }
    mem.member = std::all_of(mem.slacks.begin(), mem.slacks.end(), [](const Slack& sl) { return sl.value > 0.0; });
    return mem;
}

double omega_empty_poly(const Bounds& b, double s) {
    return (((4.0 * b.l1 * s + 4.0 * b.n1) * s + 2.0 * b.l2) * s + 2.0 * b.n2) * s;
}

double omega_prime_empty_poly(const Bounds& b, double s) {
    return (((16.0 * b.l1 * s + 16.0 * b.n1) * s + 4.0 * b.l2) * s + 4.0 * b.n2) * s;
}

bool omega_nonempty(const Bounds& b) { return uncertainty_measure(b) < 1.0; }

bool omega_prime_nonempty(const Bounds& b) { return omega_prime_empty_poly(b, b.m) < 1.0; }

namespace {

void require_positive_shape(const Bounds& b) {
    if (!(b.l1 > 0.0 && b.l2 > 0.0 && b.n1 > 0.0 && b.n2 > 0.0))
        throw std::invalid_argument("bounds: l1, l2, n1, n2 must be positive");
}

// Unique positive root of c4 s^4 + c3 s^3 + c2 s^2 + c1 s = 1 (all
// coefficients nonnegative, c1 > 0, so the left side is strictly increasing).
// Bisection down to adjacent doubles; the residual is then a few ulps.
double monotone_quartic_root(double c4, double c3, double c2, double c1) {
    const auto f = [&](double s) { return ((((c4 * s + c3) * s + c2) * s + c1) * s) - 1.0; };
    double lo = 0.0;
    double hi = 1.0 + 1.0 / c1; // f(hi) >= c1*hi - 1 > 0
    while (f(hi) < 0.0) hi *= 2.0;
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

} // namespace

double m0_star(const Bounds& b) {
    require_positive_shape(b);
    return monotone_quartic_root(16.0 * b.l1, 16.0 * b.n1, 4.0 * b.l2, 4.0 * b.n2);
}

double m2_star(const Bounds& b) {
    require_positive_shape(b);
    return monotone_quartic_root(4.0 * b.l1, 4.0 * b.n1, 2.0 * b.l2, 2.0 * b.n2);
}

Gains candidate_gains(const Bounds& b) {
    b.validate();
    if (b.m == 0.0) throw UnboundedRegionError("unbounded region: use synth_gains");
    if (uncertainty_measure(b) >= 1.0) throw RegionEmptyError("region empty");
    const double m = b.m, m2 = m * m, m3 = m2 * m, m4 = m2 * m2;
    return Gains{(1.0 - 2.0 * b.n2 * m - 2.0 * b.l2 * m2 - 2.0 * b.n1 * m3) / (2.0 * m4),
                 (1.0 - b.n2 * m) / m2};
}

GainBox bounding_box(const Bounds& b) {
    b.validate();
    if (b.m == 0.0) throw UnboundedRegionError("region unbounded");
    const double m2 = b.m * b.m;
    return GainBox{b.l1, 4.0 / (m2 * m2), b.l2, 2.0 / m2};
}

namespace {

double grid_coord(double lo, double hi, int n, int i) {
    if (n <= 1) return lo;
    return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n - 1));
}

// Best point tracker with the lexicographic tie rule on (kp, kd).
struct BestPoint {
    Gains gains{0.0, 0.0};
    double value = -std::numeric_limits<double>::infinity();
    bool seen = false;

    void consider(const Gains& g, double v) {
        if (!seen || v > value ||
            (v == value && (g.kp < gains.kp || (g.kp == gains.kp && g.kd < gains.kd)))) {
            gains = g;
            value = v;
            seen = true;
        }
    }
};

using Objective = std::function<double(const Gains&)>;

// Scans an inclusive nx-by-ny grid over `box`. Node values are computed
// independently (parallelizable); the reduction order is fixed.
BestPoint scan_grid(const Objective& obj, const GainBox& box, int nx, int ny, int threads) {
    std::vector<double> values(static_cast<std::size_t>(nx) * ny);
    parallel_for(static_cast<std::size_t>(nx), threads, [&](std::size_t i) {
        const double kp = grid_coord(box.kp_lo, box.kp_hi, nx, static_cast<int>(i));
        for (int j = 0; j < ny; ++j) {
            const double kd = grid_coord(box.kd_lo, box.kd_hi, ny, j);
            values[i * ny + j] = obj(Gains{kp, kd});
        }
    });
    BestPoint best;
    for (int i = 0; i < nx; ++i) {
        const double kp = grid_coord(box.kp_lo, box.kp_hi, nx, i);
        for (int j = 0; j < ny; ++j) {
            const double kd = grid_coord(box.kd_lo, box.kd_hi, ny, j);
            best.consider(Gains{kp, kd}, values[static_cast<std::size_t>(i) * ny + j]);
        }
    }
    return best;
}

// Shrinking local grids around the incumbent, clamped to `box`.
void refine(BestPoint& best, const Objective& obj, const GainBox& box, double hw_kp, double hw_kd, int rounds) {
    for (int r = 0; r < rounds; ++r) {
        const Gains c = best.gains;
        const GainBox local{std::max(box.kp_lo, c.kp - hw_kp), std::min(box.kp_hi, c.kp + hw_kp),
                            std::max(box.kd_lo, c.kd - hw_kd), std::min(box.kd_hi, c.kd + hw_kd)};
        for (int i = 0; i < 9; ++i) {
            const double kp = grid_coord(local.kp_lo, local.kp_hi, 9, i);
            for (int j = 0; j < 9; ++j) {
                const double kd = grid_coord(local.kd_lo, local.kd_hi, 9, j);
                best.consider(Gains{kp, kd}, obj(Gains{kp, kd}));
            }
        }
        hw_kp *= 0.6;
        hw_kd *= 0.6;
    }
}

constexpr int kCoarse = 64;
constexpr int kRefineRounds = 40;

} // namespace

Omega0Search omega0_nonempty_at(const Bounds& bounds, double m_value, int threads) {
    if (!(m_value >= 0.0)) throw std::invalid_argument("omega0_nonempty_at: m_value must be nonnegative");
    Bounds bm = bounds;
    bm.m = m_value;
    bm.validate();

    const Objective obj = [&bm](const Gains& g) { return membership(RegionId::omega0, bm, g).min_slack(); };

    if (m_value == 0.0) {
        // open and unbounded when m = 0: walk the diagonal kp = kd until inside
        double k = 1.0;
        BestPoint best;
        for (int i = 0; i < 60; ++i) {
            const double v = obj(Gains{k, k});
            best.consider(Gains{k, k}, v);
            if (v > 0.0) return Omega0Search{true, {k, k}, v};
            k *= 2.0;
        }
        return Omega0Search{false, best.gains, best.value};
    }

    const GainBox box = bounding_box(bm);
    BestPoint best = scan_grid(obj, box, kCoarse, kCoarse, threads);
    refine(best, obj, box, (box.kp_hi - box.kp_lo) / kCoarse, (box.kd_hi - box.kd_lo) / kCoarse, kRefineRounds);
    return Omega0Search{best.value > 0.0, best.gains, best.value};
}

M1Bracket m1_star(const Bounds& bounds, double tol, int threads) {
    if (!(tol > 0.0)) throw std::invalid_argument("m1_star: tol must be positive");
    bounds.validate();

    const Omega0Search at_zero = omega0_nonempty_at(bounds, 0.0, threads);
    double lo = 0.0;
    double hi = m0_star(bounds); // omega0 is provably empty from here on
    Gains witness = at_zero.witness;

    std::vector<Gains> known_members{witness};
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        Bounds bm = bounds;
        bm.m = mid;

        bool nonempty = false;
        Gains w{};
        // monotone shrinkage: any witness from a larger m stays a member here
        for (const Gains& g : known_members) {
            if (membership(RegionId::omega0, bm, g).member) {
                nonempty = true;
                w = g;
                break;
            }
        }
        if (!nonempty) {
            const Omega0Search s = omega0_nonempty_at(bounds, mid, threads);
            if (s.nonempty) {
                nonempty = true;
                w = s.witness;
                known_members.push_back(w);
            }
        }
        if (nonempty) {
            lo = mid;
            witness = w;
        } else {
            hi = mid;
        }
    }
    return M1Bracket{lo, hi, witness};
}

std::vector<RegionPoint> sample_region(RegionId region, const Bounds& bounds, const GridSpec& grid, int threads) {
    bounds.validate();
    if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("sample_region: nx and ny must be at least 2");
    GainBox box;
    if (grid.box) {
        box = *grid.box;
    } else {
        if (bounds.m == 0.0)
            throw UnboundedRegionError("sample_region: the region is unbounded for m = 0; a box is required");
        box = bounding_box(bounds);
    }

    std::vector<RegionPoint> points(static_cast<std::size_t>(grid.nx) * grid.ny);
    parallel_for(static_cast<std::size_t>(grid.nx), threads, [&](std::size_t i) {
        const double kp = grid_coord(box.kp_lo, box.kp_hi, grid.nx, static_cast<int>(i));
        for (int j = 0; j < grid.ny; ++j) {
            const double kd = grid_coord(box.kd_lo, box.kd_hi, grid.ny, j);
            const Membership mem = membership(region, bounds, Gains{kp, kd});
            points[i * grid.ny + j] = RegionPoint{kp, kd, mem.min_slack(), mem.member};
        }
    });
    return points;
}

namespace {

// Synthesis objective: the margin being maximized. For omega0 this is the
// decay constant eta (minimum of the two quadratic slacks) once inside the
// region; outside, the minimum slack steers the search toward feasibility.
double synth_objective(RegionId region, const Bounds& b, const Gains& g) {
    const Membership mem = membership(region, b, g);
    if (region == RegionId::omega0 && mem.member)
        return std::min(mem.slacks[2].value, mem.slacks[3].value);
    return mem.min_slack();
}

} // namespace

SynthResult synth_gains(const Bounds& bounds, RegionId region, int budget, int threads) {
    bounds.validate();
    if (budget < 1) throw std::invalid_argument("synth_gains: budget must be positive");

    const Objective obj = [&](const Gains& g) { return synth_objective(region, bounds, g); };

    if (bounds.m == 0.0) {
        double k = 1.0;
        BestPoint best;
        for (int i = 0; i < 60; ++i) {
            best.consider(Gains{k, k}, obj(Gains{k, k}));
            if (best.value > 0.0) break;
            k *= 2.0;
        }
        if (best.value <= 0.0) throw SynthError("no positive-margin point found within budget", best.gains, best.value);
        const double span = best.gains.kp;
        const GainBox box{1e-12, best.gains.kp + 2.0 * span, 1e-12, best.gains.kd + 2.0 * span};
        refine(best, obj, box, span / 2.0, span / 2.0, budget);
        return SynthResult{best.gains, best.value};
    }

    // provably empty regions fail fast
    if (region == RegionId::omega && !omega_nonempty(bounds)) throw RegionEmptyError("region empty");
    if (region == RegionId::omega_prime && !omega_prime_nonempty(bounds)) throw RegionEmptyError("region empty");
    if (region == RegionId::omega0 && bounds.m >= m0_star(bounds)) throw RegionEmptyError("region empty");

    const GainBox box = bounding_box(bounds);
    BestPoint best = scan_grid(obj, box, kCoarse, kCoarse, threads);
    if (region == RegionId::omega) {
        const Gains cand = candidate_gains(bounds); // guaranteed member here
        best.consider(cand, obj(cand));
    }
    if (region == RegionId::omega0) {
        const Omega0Search s = omega0_nonempty_at(bounds, bounds.m, threads);
        if (s.nonempty) best.consider(s.witness, obj(s.witness));
    }
    refine(best, obj, box, (box.kp_hi - box.kp_lo) / kCoarse, (box.kd_hi - box.kd_lo) / kCoarse, budget);

    if (best.value <= 0.0) throw SynthError("no positive-margin point found within budget", best.gains, best.value);
    return SynthResult{best.gains, best.value};
}

Thresholds thresholds(const Bounds& bounds, double m1_tol, int threads) {
    Thresholds t;
    t.m0 = m0_star(bounds);
    t.m2 = m2_star(bounds);
    t.m0_residual = std::abs(omega_prime_empty_poly(bounds, t.m0) - 1.0);
    t.m2_residual = std::abs(omega_empty_poly(bounds, t.m2) - 1.0);
    t.m1 = m1_star(bounds, m1_tol, threads);
    return t;
}

} // namespace pdstab::regions
