#include "nsvac/run_setup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nsvac {

namespace {

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> v;
    std::istringstream is(s);
    double x;
    while (is >> x) v.push_back(x);
    return v;
}

std::string join_numbers(const double* v, int count) {
    std::ostringstream os;
    char buf[40];
    for (int i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        os << (i ? " " : "") << buf;
    }
    return os.str();
}

Vec parse_vec(const std::string& s, int d) {
    auto nums = parse_numbers(s);
    if (static_cast<int>(nums.size()) != d)
        throw ConfigError("expected " + std::to_string(d) + " numbers, got '" + s + "'");
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = nums[static_cast<size_t>(i)];
    return v;
}

Mat parse_mat(const std::string& s, int d) {
    auto nums = parse_numbers(s);
    Mat m(d);
    if (static_cast<int>(nums.size()) == d) {
        for (int i = 0; i < d; ++i) m(i, i) = nums[static_cast<size_t>(i)];
    } else if (static_cast<int>(nums.size()) == d * d) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = nums[static_cast<size_t>(i * d + j)];
    } else {
        throw ConfigError("matrix needs " + std::to_string(d) + " (diagonal) or " +
                          std::to_string(d * d) + " entries: '" + s + "'");
    }
    return m;
}

} // namespace

RunSetup load_setup(const KeyValueConfig& cfg) {
    RunSetup rs;
    const int dim = static_cast<int>(cfg.get_int_or("grid.dim", 1));

    rs.params.gamma = cfg.get_double_or("params.gamma", 2.0);
    rs.params.delta = cfg.get_double_or("params.delta", 2.0);
    rs.params.alpha = cfg.get_double_or("params.alpha", 1.0);
    rs.params.beta = cfg.get_double_or("params.beta", 0.0);
    rs.params.A = cfg.get_double_or("params.A", 1.0);
    rs.params.kappa = cfg.get_double_or("params.kappa", 0.25);
    rs.params.dim = dim;
    rs.params.model = viscosity_model_from_string(cfg.get_string_or("params.model", "standard"));

    rs.grid = Grid(dim, static_cast<int>(cfg.get_int_or("grid.n", 64)),
                   cfg.get_double_or("grid.extent", 4.0));

    rs.density.kind = density_kind_from_string(cfg.get_string_or("density.family", "gaussian"));
    rs.density.eps1 = cfg.get_double_or("density.eps1", 1e-2);
    rs.density.sigma = cfg.get_double_or("density.sigma", 3.0);
    rs.density.width = cfg.get_double_or("density.width", 1.0);
    rs.density.center = cfg.has("density.center") ? parse_vec(cfg.get_string("density.center"), dim)
                                                  : Vec(dim);
    rs.cutoff_radius = cfg.get_double_or("density.cutoff_radius", 0.0);

    rs.velocity.A = cfg.has("velocity.A") ? parse_mat(cfg.get_string("velocity.A"), dim)
                                          : Mat::identity(dim);
    rs.velocity.b = cfg.has("velocity.b") ? parse_vec(cfg.get_string("velocity.b"), dim) : Vec(dim);
    rs.velocity.eps2 = cfg.get_double_or("velocity.eps2", 0.0);
    rs.velocity.pert = perturb_kind_from_string(cfg.get_string_or("velocity.pert", "none"));
    rs.velocity.pert_width = cfg.get_double_or("velocity.pert_width", 1.0);
    rs.velocity.pert_center = cfg.has("velocity.pert_center")
                                  ? parse_vec(cfg.get_string("velocity.pert_center"), dim)
                                  : Vec(dim);
    rs.velocity.kappa = rs.params.kappa;
    rs.velocity.enforce_gap = cfg.get_bool_or("velocity.enforce_gap", true);

    const std::string mode = cfg.get_string_or("solver.mode", "direct");
    if (mode == "direct") rs.solver.mode = SolverMode::direct;
    else if (mode == "picard") rs.solver.mode = SolverMode::picard;
    else throw ConfigError("solver.mode must be direct or picard");
    const std::string adv = cfg.get_string_or("solver.advection", "central_filtered");
    if (adv == "central_filtered") rs.solver.advection = AdvectionScheme::central_filtered;
    else if (adv == "upwind1") rs.solver.advection = AdvectionScheme::upwind1;
    else throw ConfigError("solver.advection must be central_filtered or upwind1");
    rs.solver.cfl = cfg.get_double_or("solver.cfl", 0.45);
    rs.solver.dt_viscous_safety = cfg.get_double_or("solver.dt_viscous_safety", 0.9);
    rs.solver.end_time = cfg.get_double_or("solver.end_time", 1.0);
    rs.solver.output_stride = cfg.get_double_or("solver.output_stride", 0.01);
    rs.solver.vacuum_floor = cfg.get_double_or("solver.vacuum_floor", 1e-12);
    rs.solver.stencil_order = static_cast<int>(cfg.get_int_or("grid.stencil_order", 2));
    rs.solver.filter_eps = cfg.get_double_or("solver.filter_eps", 1.0);
    rs.solver.grad_threshold = cfg.get_double_or("solver.grad_threshold", 200.0);
    rs.solver.picard_eta = cfg.get_double_or("solver.picard_eta", 0.0);
    rs.solver.initial_support_radius = cfg.get_double_or("solver.initial_support_radius", 0.0);

    rs.n = cfg.get_double_or("regime.n", 2.5);
    rs.m = cfg.get_double_or("regime.m", 3.0);
    rs.fit_t0 = cfg.get_double_or("diag.fit_t0", 1.0);
    rs.fit_t1 = cfg.get_double_or("diag.fit_t1", 100.0);
    rs.D0 = cfg.get_double_or("smallness.D0", 0.0);
    rs.picard_kmax = static_cast<int>(cfg.get_int_or("picard.k_max", 4));
    rs.seed = cfg.get_int_or("run.seed", 0);
    return rs;
}

KeyValueConfig to_config(const RunSetup& rs) {
    KeyValueConfig c;
    const int d = rs.params.dim;
    c.set_double("params.gamma", rs.params.gamma);
    c.set_double("params.delta", rs.params.delta);
    c.set_double("params.alpha", rs.params.alpha);
    c.set_double("params.beta", rs.params.beta);
    c.set_double("params.A", rs.params.A);
    c.set_double("params.kappa", rs.params.kappa);
    c.set("params.model", to_string(rs.params.model));
    c.set_int("grid.dim", d);
    c.set_int("grid.n", rs.grid.n);
    c.set_double("grid.extent", rs.grid.extent);
    c.set_int("grid.stencil_order", rs.solver.stencil_order);
    c.set("density.family", to_string(rs.density.kind));
    c.set_double("density.eps1", rs.density.eps1);
    c.set_double("density.sigma", rs.density.sigma);
    c.set_double("density.width", rs.density.width);
    c.set("density.center", join_numbers(rs.density.center.x.data(), d));
    c.set_double("density.cutoff_radius", rs.cutoff_radius);
    c.set("velocity.A", join_numbers(rs.velocity.A.a.data(), d * d));
    c.set("velocity.b", join_numbers(rs.velocity.b.x.data(), d));
    c.set_double("velocity.eps2", rs.velocity.eps2);
    c.set("velocity.pert", to_string(rs.velocity.pert));
    c.set_double("velocity.pert_width", rs.velocity.pert_width);
    c.set("velocity.pert_center", join_numbers(rs.velocity.pert_center.x.data(), d));
    c.set("velocity.enforce_gap", rs.velocity.enforce_gap ? "true" : "false");
    c.set("solver.mode", rs.solver.mode == SolverMode::direct ? "direct" : "picard");
    c.set("solver.advection", rs.solver.advection == AdvectionScheme::central_filtered
                                  ? "central_filtered"
                                  : "upwind1");
    c.set_double("solver.cfl", rs.solver.cfl);
    c.set_double("solver.dt_viscous_safety", rs.solver.dt_viscous_safety);
    c.set_double("solver.end_time", rs.solver.end_time);
    c.set_double("solver.output_stride", rs.solver.output_stride);
    c.set_double("solver.vacuum_floor", rs.solver.vacuum_floor);
    c.set_double("solver.filter_eps", rs.solver.filter_eps);
    c.set_double("solver.grad_threshold", rs.solver.grad_threshold);
    c.set_double("solver.picard_eta", rs.solver.picard_eta);
    c.set_double("solver.initial_support_radius", rs.solver.initial_support_radius);
    c.set_double("regime.n", rs.n);
    c.set_double("regime.m", rs.m);
    c.set_double("diag.fit_t0", rs.fit_t0);
    c.set_double("diag.fit_t1", rs.fit_t1);
    c.set_double("smallness.D0", rs.D0);
    c.set_int("picard.k_max", rs.picard_kmax);
    c.set_int("run.seed", rs.seed);
    return c;
}

BuiltRun build_run(const RunSetup& rs) {
    Field rho0 = build_density(rs.density, rs.grid, rs.params);
    if (rs.cutoff_radius > 0) rho0 = cutoff(rho0, rs.cutoff_radius);
    ReformInit init = to_reform(rho0, rs.params);
    VelocityData vel = build_velocity(rs.velocity, rs.grid, rs.params);
    BurgersFlow flow(vel.analytic);
    return BuiltRun{std::move(rho0), std::move(init), std::move(vel), std::move(flow)};
}

OdeSpec regime_ode_spec(const RegimeReport& rep, double eta) {
    DecayPrediction pred = predicted_decay(rep, eta);
    OdeSpec spec;
    spec.C1 = 1.0;
    spec.C2 = 1.0;
    if (pred.path == DecayPath::p0 || pred.path == DecayPath::p1) {
        const double b = -pred.z_exp;
        const double eps = (pred.path == DecayPath::p0)
                               ? rep.eps_star
                               : 0.25 * std::min(1.0, 3.0 * rep.gamma - 3.0);
        spec.a = 3.0;
        spec.b = b;
        spec.D1 = 1.0 + eps;
        spec.D2 = -1.0 - eps;
    } else {
        const double iota = rep.iota;
        spec.a = 2.0 * iota + 1.0;
        spec.b = rep.r + rep.n;
        spec.D1 = 2.0 * iota * rep.n - 3.0 * iota - 1.0 + (2.0 * iota - 1.0) * pred.eta;
        spec.D2 = -1.0 - pred.eta;
    }
    return spec;
}

double default_D0(const RegimeReport& rep) {
    try {
        OdeSpec spec = regime_ode_spec(rep);
        Threshold th = threshold_lambda(spec);
        return th.infinite ? 1.0 : th.lambda;
    } catch (const Error&) {
        return 0.0;
    }
}

} // namespace nsvac
