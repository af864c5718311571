#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "nsvac/norms.hpp"
#include "nsvac/operators.hpp"
#include "nsvac/run_setup.hpp"

using namespace nsvac;

namespace {

RunSetup small_data_setup(int n = 256, double t_end = 0.25) {
    RunSetup rs;
    rs.params.gamma = 2;
    rs.params.delta = 2;
    rs.params.alpha = 1;
    rs.params.beta = (0.1 - 2.0) / 3.0;  // P0 family
    rs.params.dim = 1;
    rs.params.kappa = 0.4;
    rs.grid = Grid(1, n, 4.0);
    rs.density.kind = DensityKind::gaussian;
    rs.density.eps1 = 1e-3;
    rs.density.width = 0.3;
    rs.velocity.A = Mat::identity(1);
    rs.velocity.kappa = 0.4;
    rs.solver.end_time = t_end;
    rs.solver.output_stride = 0.05;
    return rs;
}

// Flow with u0 = 0, for solver-only scenarios (gap check off: zero slope).
BurgersFlow still_flow(int dim) {
    VelocityFamily vf;
    vf.A = Mat(dim);
    vf.enforce_gap = false;
    Grid g(dim, 8, 1.0);
    Params prm;
    prm.dim = dim;
    return BurgersFlow(build_velocity(vf, g, prm).analytic);
}

} // namespace

TEST_CASE("zero data is a fixed point and the zero-density invariant holds") {
    RunSetup rs = small_data_setup(128, 0.5);
    rs.density.eps1 = 0.0;
    // eps1 = 0 fails the family positivity check; build by hand instead
    Grid g = rs.grid;
    ReformInit init{Field::scalar(g), Field::scalar(g), Field::vector(g)};
    VelocityData vel = build_velocity(rs.velocity, g, rs.params);
    BurgersFlow flow(vel.analytic);
    Solver solver(init, flow, rs.params, rs.solver);

    RhsDecomposition rhs = solver.rhs(solver.state());
    StateRate total = rhs.total();
    CHECK(total.varphi.maxabs() == 0.0);
    CHECK(total.phi.maxabs() == 0.0);
    CHECK(total.w.maxabs() == 0.0);

    Trajectory traj = solver.run({});
    CHECK(traj.halt.code == HaltReason::completed);
    CHECK(solver.state().w.maxabs() <= 1e-12);
    CHECK(solver.state().phi.maxabs() == 0.0);
}

TEST_CASE("rhs decomposition sums to the total and matches hand-built terms") {
    RunSetup rs = small_data_setup(128, 0.1);
    BuiltRun built = build_run(rs);
    Solver solver(built.init, built.flow, rs.params, rs.solver);

    // seed a nonzero w so every term participates
    ReformState s = solver.state();
    for (long p = 0; p < s.w.npts(); ++p) {
        double x = s.w.grid().point(p)[0];
        s.w.at(0, p) = 1e-3 * std::exp(-x * x);
    }
    RhsDecomposition rhs = solver.rhs(s);
    StateRate total = rhs.total();

    StateRate manual = rhs.transport_phi;
    manual.add(rhs.hyperbolic_W);
    manual.add(rhs.elliptic_W);
    manual.add(rhs.source_HQ);
    manual.add(rhs.source_G);
    CHECK((total.w - manual.w).maxabs() == 0.0);
    CHECK((total.phi - manual.phi).maxabs() == 0.0);

    SUBCASE("vanishing density leaves the pure hyperbolic w equation") {
        ReformState hyp = s;
        hyp.varphi.fill(0.0);
        hyp.phi.fill(0.0);
        RhsDecomposition r2 = solver.rhs(hyp);
        CHECK(r2.elliptic_W.w.maxabs() == 0.0);
        CHECK(r2.source_HQ.w.maxabs() == 0.0);
        CHECK(r2.transport_phi.varphi.maxabs() == 0.0);
        // w-rate = -(w+ubar).grad w - w.grad ubar
        auto bg = solver.sample_background(hyp.t);
        Field utot = hyp.w + bg.u;
        Field expect = advect(hyp.w, utot, rs.solver.advection, 2);
        expect *= -1.0;
        for (long p = 0; p < expect.npts(); ++p)
            expect.at(0, p) -= hyp.w.at(0, p) * bg.grad.at(0, p);
        StateRate t2 = r2.total();
        CHECK((t2.w - expect).maxabs() <= 1e-14);
    }

    SUBCASE("pure pressure push when only phi is present") {
        Grid g = rs.grid;
        ReformInit init{Field::scalar(g), Field::scalar(g), Field::vector(g)};
        for (long p = 0; p < g.points(); ++p) {
            double x = g.point(p)[0];
            init.phi0.at(0, p) = 1e-2 * std::exp(-2 * x * x);
        }
        BurgersFlow still = still_flow(1);
        Solver s2(init, still, rs.params, rs.solver);
        RhsDecomposition r3 = s2.rhs(s2.state());
        Field gphi = gradient(s2.state().phi);
        Field expect = Field::vector(g);
        for (long p = 0; p < g.points(); ++p)
            expect.at(0, p) =
                -0.5 * (rs.params.gamma - 1.0) * s2.state().phi.at(0, p) * gphi.at(0, p);
        StateRate t3 = r3.total();
        CHECK((t3.w - expect).maxabs() <= 1e-14);
        CHECK(t3.phi.maxabs() == 0.0);  // w = 0 and div ubar = 0
    }
}

TEST_CASE("stable_dt") {
    Grid g(1, 80, 4.0);  // h = 0.1
    Params prm;
    prm.dim = 1;
    ReformInit init{Field::scalar(g), Field::scalar(g), Field::vector(g)};
    BurgersFlow still = still_flow(1);
    SolverConfig cfg;
    cfg.cfl = 0.5;
    cfg.output_stride = 10.0;

    SUBCASE("advective bound from |w + ubar| = 1 on vacuum") {
        Solver solver(init, still, prm, cfg);
        ReformState s = solver.state();
        s.w.fill(1.0);
        CHECK(solver.stable_dt(s) == doctest::Approx(0.5 * 0.1).epsilon(1e-12));
    }
    SUBCASE("doubling phi halves the acoustic part of the bound") {
        Solver solver(init, still, prm, cfg);
        ReformState s = solver.state();
        s.phi.fill(2.0);  // speed = (gamma-1)/2 |phi| = 1
        double dt1 = solver.stable_dt(s);
        s.phi.fill(4.0);
        double dt2 = solver.stable_dt(s);
        CHECK(dt1 == doctest::Approx(2.0 * dt2).epsilon(1e-12));
    }
    SUBCASE("zero state is capped by the output stride") {
        Solver solver(init, still, prm, cfg);
        CHECK(solver.stable_dt(solver.state()) == cfg.output_stride);
    }
    SUBCASE("viscous bound engages where varphi is large") {
        Solver solver(init, still, prm, cfg);
        ReformState s = solver.state();
        s.varphi.fill(3.0);  // varphi^2 = 9
        double expect = cfg.cfl * cfg.dt_viscous_safety * 0.1 * 0.1 /
                        (2.0 * 1 * 9.0 * (prm.alpha + std::abs(prm.alpha + prm.beta)));
        CHECK(solver.stable_dt(s) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("a vanishing-density run reduces to the exact background evolution") {
    // w0 plays the role of the full velocity: build a flow whose data equal
    // w0 and compare the advected w against it. The oracle is built by hand
    // (no normalization), so w0 stays a compact bump.
    Grid g(1, 512, 6.0);
    Params prm;
    prm.dim = 1;

    const double amp = 0.1, s2 = 2.0 * 0.5 * 0.5;
    InitialVelocity bump;
    bump.dim = 1;
    bump.u0 = [=](const Vec& x) { return Vec(1, amp * std::exp(-x[0] * x[0] / s2)); };
    bump.grad_u0 = [=](const Vec& x) {
        Mat m(1);
        m(0, 0) = amp * std::exp(-x[0] * x[0] / s2) * (-2.0 * x[0] / s2);
        return m;
    };
    bump.hess_u0 = [=](const Vec& x) {
        Mat m(1);
        double e = std::exp(-x[0] * x[0] / s2);
        m(0, 0) = amp * e * (4.0 * x[0] * x[0] / (s2 * s2) - 2.0 / s2);
        return std::array<Mat, 3>{m, Mat(1), Mat(1)};
    };
    BurgersFlow oracle(bump);

    ReformInit init{Field::scalar(g), Field::scalar(g), Field::vector(g)};
    for (long p = 0; p < g.points(); ++p) init.w0.at(0, p) = bump.u0(g.point(p))[0];
    BurgersFlow still = still_flow(1);
    SolverConfig cfg;
    cfg.end_time = 0.5;
    cfg.output_stride = 0.05;
    cfg.cfl = 0.4;
    Solver solver(init, still, prm, cfg);
    Trajectory traj = solver.run({});
    REQUIRE(traj.halt.code == HaltReason::completed);

    double err = 0;
    for (long p = 0; p < g.points(); ++p) {
        auto e = oracle.eval(0.5, g.point(p));
        err = std::max(err, std::abs(solver.state().w.at(0, p) - e.u[0]));
    }
    CHECK(err <= 2e-4);  // truncation + filter at N=512
}

TEST_CASE("one step is reversible to third order without the filter") {
    RunSetup rs = small_data_setup(256, 1.0);
    rs.solver.filter_eps = 0.0;
    BuiltRun built = build_run(rs);

    auto roundtrip_error = [&](double dt) {
        Solver solver(built.init, built.flow, rs.params, rs.solver);
        Field v0 = solver.state().varphi;
        solver.step(dt);
        solver.step(-dt);
        return (solver.state().varphi - v0).maxabs();
    };
    double e1 = roundtrip_error(1e-3);
    double e2 = roundtrip_error(5e-4);
    CHECK(e1 <= 1e-10);
    if (e1 > 1e-14) CHECK(e2 <= e1 / 6.0);  // at least 3rd order in dt
}

TEST_CASE("grid self-convergence at second order on smooth data") {
    auto run_at = [&](int n) {
        RunSetup rs = small_data_setup(n, 0.25);
        rs.density.eps1 = 5e-3;
        BuiltRun built = build_run(rs);
        Solver solver(built.init, built.flow, rs.params, rs.solver);
        solver.run({});
        return solver.state();
    };
    ReformState s128 = run_at(128);
    ReformState s256 = run_at(256);
    ReformState s512 = run_at(512);

    auto restricted_err = [](const ReformState& coarse, const ReformState& fine) {
        double e2 = 0;
        const Grid& gc = coarse.phi.grid();
        double hd = gc.spacing();
        for (long p = 0; p < gc.points(); ++p) {
            double d = coarse.phi.at(0, p) - fine.phi.at(0, 2 * p);
            double dw = coarse.w.at(0, p) - fine.w.at(0, 2 * p);
            e2 += (d * d + dw * dw) * hd;
        }
        return std::sqrt(e2);
    };
    double e1 = restricted_err(s128, s256);
    double e2 = restricted_err(s256, s512);
    INFO("e1 ", e1, " e2 ", e2);
    CHECK(e2 <= e1 / 3.0);
}

TEST_CASE("physical variables and the dual density gap") {
    SUBCASE("prefactor for gamma = 3, A = 3/4 is 2/3") {
        Params prm;
        prm.gamma = 3;
        prm.A = 0.75;
        CHECK(phi_to_rho_prefactor(prm) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("exact initial data has a vanishing gap") {
        RunSetup rs = small_data_setup(128, 0.1);
        rs.params.gamma = 1.8;
        rs.params.delta = 2.2;
        BuiltRun built = build_run(rs);
        Solver solver(built.init, built.flow, rs.params, rs.solver);
        auto phys = solver.to_physical();
        CHECK(phys.dual_gap <= 1e-12);
        // rho itself matches the family values
        Field rho_ref = build_density(rs.density, rs.grid, rs.params);
        CHECK((phys.rho - rho_ref).maxabs() <= 1e-14);
    }
    SUBCASE("gap stays small along a short run") {
        RunSetup rs = small_data_setup(256, 0.25);
        BuiltRun built = build_run(rs);
        Solver solver(built.init, built.flow, rs.params, rs.solver);
        solver.run({});
        CHECK(solver.to_physical().dual_gap <= 1e-4);
    }
}

TEST_CASE("support radius stays within the envelope on a short reference run") {
    RunSetup rs = small_data_setup(512, 0.5);
    rs.density.width = 0.2;
    BuiltRun built = build_run(rs);
    Solver solver(built.init, built.flow, rs.params, rs.solver);
    std::vector<double> excess;
    Observer watch = [&](const Solver& s, const Snapshot& snap) {
        (void)s;
        excess.push_back(snap.support_radius - snap.support_envelope);
    };
    Trajectory traj = solver.run({watch});
    REQUIRE(traj.halt.code == HaltReason::completed);
    for (double e : excess) CHECK(e <= rs.grid.spacing() + 1e-12);
}

TEST_CASE("halts: gradient blow-up and support wrap-around") {
    SUBCASE("vacuum region with a negative slope triggers the gradient monitor") {
        RunSetup rs = small_data_setup(512, 3.0);
        rs.grid = Grid(1, 512, 8.0);
        rs.density.width = 0.25;
        rs.velocity.eps2 = 2.0;
        rs.velocity.pert = PerturbKind::slope_well;
        rs.velocity.pert_width = 0.4;
        rs.velocity.pert_center = Vec(1, 2.5);
        rs.velocity.enforce_gap = false;
        rs.solver.grad_threshold = 50.0;
        rs.solver.output_stride = 0.02;
        BuiltRun built = build_run(rs);
        Solver solver(built.init, built.flow, rs.params, rs.solver);
        Trajectory traj = solver.run({});
        CHECK(traj.halt.code == HaltReason::gradient_threshold);
        CHECK(traj.halt.t < 1.05);
        CHECK(traj.halt.t > 0.8);
    }
    SUBCASE("support growth against the box edge halts the run") {
        RunSetup rs = small_data_setup(128, 50.0);
        rs.grid = Grid(1, 128, 2.0);
        rs.density.width = 0.5;
        rs.solver.output_stride = 0.1;
        BuiltRun built = build_run(rs);
        Solver solver(built.init, built.flow, rs.params, rs.solver);
        Trajectory traj = solver.run({});
        CHECK(traj.halt.code == HaltReason::support_wraparound);
    }
}

TEST_CASE("picard iteration contracts on a short horizon") {
    RunSetup rs = small_data_setup(128, 0.15);
    rs.density.eps1 = 5e-3;
    rs.solver.output_stride = 0.15;
    BuiltRun built = build_run(rs);
    PicardResult pr = picard_solve(built.init, built.flow, rs.params, rs.solver, 4);
    REQUIRE(pr.ratios.size() >= 3);
    for (double r : pr.ratios) {
        INFO("ratio ", r);
        CHECK(r < 1.0);
    }

    // the limit sits close to the direct scheme
    BuiltRun built2 = build_run(rs);
    Solver direct(built2.init, built2.flow, rs.params, rs.solver);
    direct.run({});
    Field dphi = pr.final_state.phi - direct.state().phi;
    Field dw = pr.final_state.w - direct.state().w;
    double diff = std::sqrt(inner(dphi, dphi) + inner(dw, dw));
    double scale = std::sqrt(inner(direct.state().phi, direct.state().phi));
    INFO("relative diff ", diff / scale);
    CHECK(diff <= 0.05 * scale);
}
