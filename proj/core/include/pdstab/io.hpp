#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

#include "pdstab/certificates.hpp"
#include "pdstab/moments.hpp"
#include "pdstab/montecarlo.hpp"
#include "pdstab/plants.hpp"
#include "pdstab/regions.hpp"
#include "pdstab/types.hpp"

namespace pdstab::io {

// Insertion-ordered JSON keeps emitted key order deterministic.
using json = nlohmann::ordered_json;

// Shortest round-trip decimal form; identical doubles give identical bytes.
std::string format_double(double v);

// --- config parsing ---------------------------------------------------------
// Config files are a JSON tree with sections "bounds", "gains", "plant",
// "sim", "output". Matrices are nested arrays, row major; a plain number is
// accepted as a 1x1 matrix, and a flat array as a vector.

Eigen::MatrixXd matrix_from_json(const json& j);
Eigen::VectorXd vector_from_json(const json& j);

Bounds bounds_from_json(const json& section);
Gains gains_from_json(const json& section);
mc::SimConfig sim_from_json(const json& section);

// A parsed plant section. Benchmark kinds build the nonlinear family;
// "linear" and "corner" build a LinearPlant (also exposed as nonlinear for
// simulation).
struct ParsedPlant {
    std::optional<LinearPlant> linear;
    std::optional<NonlinearPlant> nonlinear;
};

ParsedPlant plant_from_json(const json& section, const Bounds& bounds);

// --- emission ---------------------------------------------------------------

json bounds_to_json(const Bounds& b);
json gains_to_json(const Gains& g);
json membership_to_json(const regions::Membership& mem);
json validation_to_json(const PlantValidation& v);
json plant_to_json(const LinearPlant& p);

// CSV bodies, headers included, '\n' line endings.
std::string region_csv(const std::vector<regions::RegionPoint>& points); // kp,kd,min_slack,member
std::string moments_csv(const moments::MomentTrajectory& traj);          // t,trace,p11,... (upper triangle)
std::string ms_csv(const mc::MsEstimate& est);                           // t,mean_sq,stderr,n_alive

} // namespace pdstab::io
