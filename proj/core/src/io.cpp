#include "pdstab/io.hpp"

#include <charconv>
#include <stdexcept>

namespace pdstab::io {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: expected a number or nested arrays");
    if (!j.front().is_array()) {
        // flat array: single row
        Eigen::MatrixXd m(1, j.size());
        for (std::size_t c = 0; c < j.size(); ++c) m(0, c) = j[c].get<double>();
        return m;
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw std::invalid_argument("matrix: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
    if (!j.is_array()) throw std::invalid_argument("vector: expected a number or an array");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

Bounds bounds_from_json(const json& s) {
    Bounds b{s.at("l1").get<double>(), s.at("l2").get<double>(), s.at("n1").get<double>(),
             s.at("n2").get<double>(), s.at("m").get<double>()};
    b.validate();
    return b;
}

Gains gains_from_json(const json& s) {
    return Gains{s.at("kp").get<double>(), s.at("kd").get<double>()};
}

mc::SimConfig sim_from_json(const json& s) {
    mc::SimConfig cfg;
    if (s.contains("horizon")) cfg.horizon = s.at("horizon").get<double>();
    if (s.contains("dt")) cfg.dt = s.at("dt").get<double>();
    if (s.contains("trials")) cfg.trials = s.at("trials").get<int>();
    if (s.contains("seed")) cfg.master_seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("x1_0")) cfg.x1_0 = vector_from_json(s.at("x1_0"));
    if (s.contains("x2_0")) cfg.x2_0 = vector_from_json(s.at("x2_0"));
    return cfg;
}

ParsedPlant plant_from_json(const json& s, const Bounds& bounds) {
    const std::string type = s.value("type", "corner");
    ParsedPlant out;
    if (type == "linear") {
        LinearPlant p{matrix_from_json(s.at("a")), matrix_from_json(s.at("b")), matrix_from_json(s.at("c")),
                      matrix_from_json(s.at("d")), matrix_from_json(s.at("e"))};
        out.nonlinear = as_nonlinear(p, Eigen::VectorXd::Zero(p.n()));
        out.linear = std::move(p);
        return out;
    }
    if (type == "corner") {
        const Eigen::Index n = s.value("n", 1);
        LinearPlant p = corner_plant(bounds, n);
        out.nonlinear = as_nonlinear(p, Eigen::VectorXd::Zero(n));
        out.linear = std::move(p);
        return out;
    }

    PlantKind kind;
    if (type == "sine") kind = PlantKind::sine;
    else if (type == "nonaffine_sine") kind = PlantKind::nonaffine_sine;
    else if (type == "corner_linear") kind = PlantKind::corner_linear;
    else if (type == "offset_equilibrium") kind = PlantKind::offset_equilibrium;
    else throw std::invalid_argument("plant: unknown type '" + type + "'");

    const Eigen::Index n = s.value("n", 1);
    Eigen::VectorXd ystar = s.contains("ystar") ? vector_from_json(s.at("ystar")) : Eigen::VectorXd::Zero(n);
    if (ystar.size() == 1 && n > 1) ystar = Eigen::VectorXd::Constant(n, ystar(0));

    PlantParams params;
    if (s.contains("eps")) params.eps = s.at("eps").get<double>();
    if (s.contains("delta")) {
        params.delta = vector_from_json(s.at("delta"));
        if (params.delta.size() == 1 && n > 1) params.delta = Eigen::VectorXd::Constant(n, params.delta(0));
    }
    out.nonlinear = benchmark_plant(kind, bounds, n, ystar, params);

    if (kind == PlantKind::corner_linear) {
        // same dynamics in linear form, usable by the moment and certificate paths
        out.linear = corner_plant(bounds, n);
    }
    return out;
}

json bounds_to_json(const Bounds& b) {
    return json{{"l1", b.l1}, {"l2", b.l2}, {"n1", b.n1}, {"n2", b.n2}, {"m", b.m}};
}

json gains_to_json(const Gains& g) { return json{{"kp", g.kp}, {"kd", g.kd}}; }

json membership_to_json(const regions::Membership& mem) {
    json slacks = json::object();
    for (const auto& s : mem.slacks) slacks[s.name] = s.value;
    return json{{"member", mem.member}, {"min_slack", mem.min_slack()}, {"slacks", slacks}};
}

json validation_to_json(const PlantValidation& v) {
    json checks = json::object();
    for (const auto& c : v.checks) checks[c.name] = json{{"norm", c.norm}, {"bound", c.bound}, {"ok", c.ok}};
    return json{{"pass", v.pass}, {"checks", checks}};
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

json plant_to_json(const LinearPlant& p) {
    return json{{"n", p.n()},          {"a", matrix_to_json(p.a)}, {"b", matrix_to_json(p.b)},
                {"c", matrix_to_json(p.c)}, {"d", matrix_to_json(p.d)}, {"e", matrix_to_json(p.e)}};
}

std::string region_csv(const std::vector<regions::RegionPoint>& points) {
    std::string out = "kp,kd,min_slack,member\n";
    for (const auto& p : points) {
        out += format_double(p.kp);
        out += ',';
        out += format_double(p.kd);
        out += ',';
        out += format_double(p.min_slack);
        out += ',';
        out += p.member ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string moments_csv(const moments::MomentTrajectory& traj) {
    std::string out = "t,trace";
    if (!traj.states.empty()) {
        const Eigen::Index dim = traj.states.front().p.rows();
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = i; j < dim; ++j)
                out += ",p" + std::to_string(i + 1) + std::to_string(j + 1);
    }
    out += '\n';
    for (const auto& st : traj.states) {
        out += format_double(st.t);
        out += ',';
        out += format_double(st.p.trace());
        const Eigen::Index dim = st.p.rows();
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = i; j < dim; ++j) {
                out += ',';
                out += format_double(st.p(i, j));
            }
        out += '\n';
    }
    return out;
}

std::string ms_csv(const mc::MsEstimate& est) {
    std::string out = "t,mean_sq,stderr,n_alive\n";
    for (std::size_t k = 0; k < est.times.size(); ++k) {
        out += format_double(est.times[k]);
        out += ',';
        out += format_double(est.mean_sq[k]);
        out += ',';
        out += format_double(est.std_err[k]);
        out += ',';
        out += std::to_string(est.n_alive[k]);
        out += '\n';
    }
    return out;
}

} // namespace pdstab::io
