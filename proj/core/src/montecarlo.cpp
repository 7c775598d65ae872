#include "pdstab/montecarlo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pdstab/certificates.hpp"
#include "pdstab/errors.hpp"
#include "pdstab/parallel.hpp"
#include "pdstab/rng.hpp"

namespace pdstab::mc {

namespace {

constexpr double kBlowupNorm = 1e8;
constexpr int kTreeLeaf = 32; // trials per reduction leaf, fixed

long step_count(const SimConfig& cfg) { return std::max<long>(1, std::llround(cfg.horizon / cfg.dt)); }

// Runs one Euler-Maruyama path, invoking on_sample(step, x1, x2, u) at step 0
// and after every completed step. Returns the truncation step (negative when
// the path ran to the horizon).
template <typename OnSample>
long run_path(const NonlinearPlant& plant, const Gains& gains, const SimConfig& cfg, int trial_index,
              OnSample&& on_sample) {
    const long nsteps = step_count(cfg);
    const double sqrt_dt = std::sqrt(cfg.dt);

    Eigen::VectorXd x1 = cfg.x1_0;
    Eigen::VectorXd x2 = cfg.x2_0;
    Eigen::VectorXd u = gains.kp * (plant.ystar - x1) - gains.kd * x2;
    on_sample(0L, x1, x2, u);

    for (long k = 1; k <= nsteps; ++k) {
        const Eigen::VectorXd drift = plant.f(x1, x2, u);
        const Eigen::VectorXd diffusion = plant.g(x1, x2, u);
        const double db = sqrt_dt * gaussian_draw(cfg.master_seed, static_cast<std::uint64_t>(trial_index),
                                                  static_cast<std::uint64_t>(k - 1));
        x1 += cfg.dt * x2;
        x2 += cfg.dt * drift + db * diffusion;
        u = gains.kp * (plant.ystar - x1) - gains.kd * x2;

        const double size_sq = x1.squaredNorm() + x2.squaredNorm();
        if (!std::isfinite(size_sq) || size_sq > kBlowupNorm * kBlowupNorm) return k;
        on_sample(k, x1, x2, u);
    }
    return -1;
}

} // namespace

void SimConfig::validate(Eigen::Index n) const {
    if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
    if (!(horizon >= dt)) throw std::invalid_argument("sim: horizon must be at least dt");
    if (trials < 1) throw std::invalid_argument("sim: trials must be at least 1");
    if (x1_0.size() != n || x2_0.size() != n)
        throw std::invalid_argument("sim: initial state dimension does not match the plant");
}

Path simulate_path(const NonlinearPlant& plant, const Gains& gains, const SimConfig& cfg, int trial_index) {
    cfg.validate(plant.n);
    const long nsteps = step_count(cfg);

    Path path;
    path.times.reserve(nsteps + 1);
    path.x1.reserve(nsteps + 1);
    path.x2.reserve(nsteps + 1);
    path.u.reserve(nsteps + 1);

    const long cut = run_path(plant, gains, cfg, trial_index,
                              [&](long k, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                  const Eigen::VectorXd& u) {
                                  path.times.push_back(static_cast<double>(k) * cfg.dt);
                                  path.x1.push_back(x1);
                                  path.x2.push_back(x2);
                                  path.u.push_back(u);
                              });
    if (cut >= 0) {
        path.blew_up = true;
        path.blowup_time = static_cast<double>(cut) * cfg.dt;
    }
    return path;
}

Path simulate_path(const LinearPlant& plant, const Gains& gains, const SimConfig& cfg, int trial_index) {
    return simulate_path(as_nonlinear(plant, Eigen::VectorXd::Zero(plant.n())), gains, cfg, trial_index);
}

namespace {

struct Partial {
    std::vector<double> sum, sum_sq;
    std::vector<int> alive;
    int blowups = 0;

    explicit Partial(std::size_t grid) : sum(grid, 0.0), sum_sq(grid, 0.0), alive(grid, 0) {}

    void absorb(const Partial& other) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += other.sum[i];
            sum_sq[i] += other.sum_sq[i];
            alive[i] += other.alive[i];
        }
        blowups += other.blowups;
    }
};

} // namespace

MsEstimate estimate_ms(const NonlinearPlant& plant, const Gains& gains, const SimConfig& cfg, int threads) {
    cfg.validate(plant.n);
    const long nsteps = step_count(cfg);
    const std::size_t grid = static_cast<std::size_t>(nsteps) + 1;

    const int nblocks = (cfg.trials + kTreeLeaf - 1) / kTreeLeaf;
    std::vector<Partial> partials(static_cast<std::size_t>(nblocks), Partial(grid));

    parallel_for(static_cast<std::size_t>(nblocks), threads, [&](std::size_t blk) {
        Partial& part = partials[blk];
        const int lo = static_cast<int>(blk) * kTreeLeaf;
        const int hi = std::min(cfg.trials, lo + kTreeLeaf);
        for (int trial = lo; trial < hi; ++trial) {
            const long cut = run_path(plant, gains, cfg, trial,
                                      [&](long k, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                          const Eigen::VectorXd&) {
                                          const double s = (plant.ystar - x1).squaredNorm() + x2.squaredNorm();
                                          part.sum[k] += s;
                                          part.sum_sq[k] += s * s;
                                          part.alive[k] += 1;
                                      });
            if (cut >= 0) part.blowups += 1;
        }
    });

    // fixed pairwise tree over the leaf blocks
    std::size_t count = partials.size();
    while (count > 1) {
        const std::size_t half = (count + 1) / 2;
        for (std::size_t i = 0; i + half < count; ++i) partials[i].absorb(partials[i + half]);
        count = half;
    }
    const Partial& total = partials.front();

    if (total.blowups == cfg.trials) {
        std::ostringstream msg;
        msg << "estimate_ms: all " << cfg.trials << " trials blew up before the horizon";
        throw BlowupError(msg.str());
    }

    MsEstimate est;
    est.trials = cfg.trials;
    est.blowups = total.blowups;
    est.degenerate = cfg.trials == 1;
    est.times.resize(grid);
    est.mean_sq.resize(grid);
    est.std_err.resize(grid);
    est.n_alive = total.alive;
    for (std::size_t k = 0; k < grid; ++k) {
        est.times[k] = static_cast<double>(k) * cfg.dt;
        const int n = total.alive[k];
        const double mean = n > 0 ? total.sum[k] / n : 0.0;
        est.mean_sq[k] = mean;
        if (n > 1) {
            const double var = std::max(0.0, (total.sum_sq[k] - total.sum[k] * mean) / (n - 1));
            est.std_err[k] = std::sqrt(var / n);
        } else {
            est.std_err[k] = 0.0;
        }
    }
    return est;
}

MsEstimate estimate_ms(const LinearPlant& plant, const Gains& gains, const SimConfig& cfg, int threads) {
    return estimate_ms(as_nonlinear(plant, Eigen::VectorXd::Zero(plant.n())), gains, cfg, threads);
}

McVerdict convergence_verdict(const MsEstimate& est, double threshold, double tail) {
    if (est.mean_sq.empty()) throw std::invalid_argument("convergence_verdict: empty estimate");
    if (!(tail > 0.0 && tail <= 1.0)) throw std::invalid_argument("convergence_verdict: tail must be in (0, 1]");

    const std::size_t n = est.mean_sq.size();
    const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(tail * n)));
    double acc = 0.0;
    for (std::size_t i = n - count; i < n; ++i) acc += est.mean_sq[i];
    const double tail_mean = acc / static_cast<double>(count);

    const double base = est.mean_sq.front();
    const bool converged = base > 0.0 ? tail_mean < threshold * base : tail_mean < threshold;
    return converged ? McVerdict::converged : McVerdict::not_converged;
}

Prop1Report proposition1_demo(const Eigen::VectorXd& delta, const Gains& gains, const SimConfig& cfg,
                              int threads, double tail) {
    const Eigen::Index n = delta.size();
    if (n < 1) throw std::invalid_argument("proposition1_demo: delta must be nonempty");
    const certificates::AlphaTriple alpha = certificates::alpha_coeffs(-gains.kp, -gains.kd, 0.0, 0.0);
    if (!certificates::routh_hurwitz(alpha))
        throw std::invalid_argument("proposition1_demo: gains do not stabilize the unperturbed loop");

    PlantParams params;
    params.delta = delta;
    const NonlinearPlant plant = benchmark_plant(PlantKind::offset_equilibrium, Bounds{1.0, 1.0, 1.0, 1.0, 0.0},
                                                 n, Eigen::VectorXd::Zero(n), params);

    Prop1Report report;
    report.estimate = estimate_ms(plant, gains, cfg, threads);
    report.expected_error_sq = delta.squaredNorm() / (gains.kp * gains.kp);

    // g = 0 makes every trial identical; one pass gives the ||e||^2 tail
    const long nsteps = step_count(cfg);
    const std::size_t grid = static_cast<std::size_t>(nsteps) + 1;
    std::vector<double> esq(grid, 0.0);
    run_path(plant, gains, cfg, 0, [&](long k, const Eigen::VectorXd& x1, const Eigen::VectorXd&,
                                       const Eigen::VectorXd&) {
        esq[k] = (plant.ystar - x1).squaredNorm();
    });
    const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(tail * grid)));
    double acc = 0.0;
    for (std::size_t i = grid - count; i < grid; ++i) acc += esq[i];
    report.tail_error_sq = acc / static_cast<double>(count);
    return report;
}

} // namespace pdstab::mc
