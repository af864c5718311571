// Acceptance suite: one numbered check per release criterion, each printed as
// a pass/fail line with its measured value against the pinned tolerance.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "nsvac/diagnostics.hpp"
#include "nsvac/norms.hpp"
#include "nsvac/operators.hpp"
#include "nsvac/picard.hpp"
#include "nsvac/run_setup.hpp"
#include "test_util.hpp"

using namespace nsvac;

namespace {

int failures = 0;

void record(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %s  (%s)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <typename Fn>
void guarded(const char* label, Fn fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        record(label, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Params p0_params() {
    Params p;
    p.gamma = 2;
    p.delta = 2;
    p.alpha = 1;
    p.beta = (0.1 - 2.0) / 3.0;  // 2a+3b = 0.1, deep inside the P0 window
    p.kappa = 0.2;
    p.dim = 1;
    return p;
}

// ---------------------------------------------------------------------------

void criterion_1_background_exactness() {
    auto t0 = std::chrono::steady_clock::now();
    Mat A(3);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    A(2, 2) = 3.0;
    A(0, 1) = 0.2;
    A(1, 2) = -0.15;
    BurgersFlow flow(InitialVelocity::affine(3, A));
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> ut(0.0, 100.0), ux(-20.0, 20.0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        double t = ut(rng);
        Vec x(3, ux(rng), ux(rng), ux(rng));
        Mat M = Mat::identity(3);
        M += t * A;
        double dm = det(M);
        Mat ref_grad = inverse(M, dm) * A;
        Vec ref_u = ref_grad * x;  // A (I+tA)^{-1} x, matrices commute
        auto e = flow.eval(t, x);
        worst = std::max(worst, (e.grad - ref_grad).maxabs());
        worst = std::max(worst, (e.u - ref_u).maxabs());
    }
    double dt = seconds_since(t0);
    record("1. background flow matches the linear closed form",
           worst <= 1e-10 && dt < 1.0, "max err " + fmt(worst) + ", " + fmt(dt) + " s");
}

void criterion_2_background_decay() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (int d : {1, 2}) {
        VelocityFamily vf;
        vf.A = Mat::identity(d);
        vf.eps2 = 0.05;
        vf.pert = PerturbKind::gaussian_bump;
        vf.pert_width = 0.5;
        vf.kappa = 0.25;
        Grid g(d, d == 1 ? 4096 : 384, 8.0);
        Params prm;
        prm.dim = d;
        VelocityData vel = build_velocity(vf, g, prm);
        BurgersFlow flow(vel.analytic);
        std::vector<double> ts;
        for (int i = 0; i < 16; ++i) ts.push_back(std::pow(10.0, 2.0 * i / 15.0));
        DecayReport rep = decay_report(flow, 2, 3, ts, g, 1.0, 100.0);
        for (const auto& s : rep.slopes) {
            if (s.quantity == "grad2_linf") continue;  // 3-D case handles the sup norm
            ok = ok && std::abs(s.fitted - s.predicted) <= 0.15;
            detail += " d" + std::to_string(d) + ":" + s.quantity + " " + fmt(s.fitted - s.predicted);
        }
    }
    {
        // 3-D sup norm of grad^2 at coarse 32^3 sampling
        VelocityFamily vf;
        vf.A = Mat::identity(3);
        vf.eps2 = 0.05;
        vf.pert = PerturbKind::gaussian_bump;
        vf.pert_width = 0.6;
        vf.kappa = 0.25;
        Grid g(3, 32, 6.0);
        Params prm;
        prm.dim = 3;
        VelocityData vel = build_velocity(vf, g, prm);
        BurgersFlow flow(vel.analytic);
        std::vector<double> ts;
        for (int i = 0; i < 12; ++i) ts.push_back(std::pow(10.0, 2.0 * i / 11.0));
        DecayReport rep = decay_report(flow, 2, 2, ts, g, 1.0, 100.0);
        double dev = 1e9;
        for (const auto& s : rep.slopes)
            if (s.quantity == "grad2_linf") dev = std::abs(s.fitted + 3.0);
        ok = ok && dev <= 0.15;
        detail += " d3:linf " + fmt(dev);
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 120.0;
    record("2. background decay exponents within 0.15", ok, detail + ", " + fmt(dt) + " s");
}

void criterion_3_ode_oracle() {
    auto t0 = std::chrono::steady_clock::now();
    struct Case {
        OdeSpec s;
    };
    std::vector<OdeSpec> cases;
    {
        OdeSpec s;
        s.a = 3;
        s.b = 2;
        s.C1 = 1;
        s.C2 = 1;
        s.D1 = 0;
        s.D2 = -2;
        s.Z0 = 0.1;
        cases.push_back(s);
        s.a = 2;
        s.b = 1.5;
        s.C1 = 0.5;
        s.C2 = 0.7;
        s.D1 = -0.8;
        s.D2 = -1.7;
        s.Z0 = 0.4;
        cases.push_back(s);
        s.a = 5;
        s.b = 1.8;
        s.C1 = 2.0;
        s.C2 = 0.0;
        s.D1 = 1.0;
        s.D2 = -3.0;
        s.Z0 = 0.2;
        cases.push_back(s);
    }
    double worst = 0;
    for (const auto& s : cases) {
        OdeTrajectory tr = integrate(s, 100.0, 1e-10);
        for (size_t i = 0; i < tr.t.size(); i += 5) {
            double ref = closed_form(s, tr.t[i], 1e-13).value;
            worst = std::max(worst, std::abs(tr.z[i] - ref) / ref);
        }
    }
    OdeSpec worked;
    worked.a = 2;
    worked.b = 2;
    worked.C1 = 1;
    worked.C2 = 0;
    worked.D1 = 0;
    Threshold th = threshold_lambda(worked);
    double dt = seconds_since(t0);
    bool ok = worst <= 1e-8 && std::abs(th.lambda - 1.0) <= 1e-6 && dt < 10.0;
    record("3. comparison-ODE integrator against the closed form", ok,
           "max rel err " + fmt(worst) + ", lambda-1 " + fmt(th.lambda - 1.0) + ", " + fmt(dt) +
               " s");
}

RunSetup conservation_setup() {
    RunSetup rs;
    rs.params.gamma = 3;
    rs.params.delta = 3;
    rs.params.alpha = 1;
    rs.params.beta = 0;
    rs.params.kappa = 0.25;
    rs.params.dim = 1;
    rs.grid = Grid(1, 512, 8.0);
    rs.density.kind = DensityKind::gaussian;
    rs.density.eps1 = 1e-3;
    rs.density.width = 0.5;
    rs.density.center = Vec(1, 1.0);  // nonzero initial momentum
    rs.velocity.A = Mat::identity(1);
    rs.velocity.kappa = 0.25;
    rs.solver.end_time = 1.0;
    rs.solver.output_stride = 0.01;
    return rs;
}

DiagnosticsSeries conservation_series;  // shared by criteria 4 and 5

void criterion_4_conservation() {
    auto t0 = std::chrono::steady_clock::now();
    RunSetup rs = conservation_setup();
    BuiltRun built = build_run(rs);
    Solver solver(built.init, built.flow, rs.params, rs.solver);
    Recorder rec(conservation_series, rs.n, rs.m, rs.solver.vacuum_floor);
    Trajectory traj = solver.run({rec.observer()});
    const auto& rows = conservation_series.rows();
    double m0 = rows.front().mass;
    double p0 = rows.front().momentum[0];
    double dm = 0, dp = 0;
    for (const auto& r : rows) {
        dm = std::max(dm, std::abs(r.mass - m0) / std::abs(m0));
        dp = std::max(dp, std::abs(r.momentum[0] - p0) / std::abs(p0));
    }
    double dt = seconds_since(t0);
    bool ok = traj.halt.code == HaltReason::completed && dm <= 1e-6 && dp <= 1e-6 && dt < 60.0;
    record("4. mass/momentum drift below 1e-6 on [0,1]", ok,
           "mass " + fmt(dm) + ", momentum " + fmt(dp) + ", " + fmt(dt) + " s");
}

void criterion_5_kinetic_bound() {
    KineticBoundVerdict v = kinetic_lower_bound(conservation_series, 1e-3);
    record("5. kinetic-energy lower bound at every stride", v.applicable && v.ok,
           std::string("applicable ") + (v.applicable ? "yes" : "no") + ", min margin " +
               fmt(v.margin));
}

void criterion_6_vacuum_invariant() {
    auto t0 = std::chrono::steady_clock::now();

    // (a) zero-density run: w stays identically zero
    RunSetup rs = conservation_setup();
    Grid g = rs.grid;
    ReformInit zero_init{Field::scalar(g), Field::scalar(g), Field::vector(g)};
    VelocityData vel = build_velocity(rs.velocity, g, rs.params);
    BurgersFlow flow(vel.analytic);
    SolverConfig cfg = rs.solver;
    cfg.end_time = 0.5;
    Solver zsolver(zero_init, flow, rs.params, cfg);
    zsolver.run({});
    double wmax = zsolver.state().w.maxabs();

    // (b) vacuum patch: the velocity solves the pressureless equation there.
    // Compactly supported density, fine output stride for the 2nd-order
    // backward time difference.
    RunSetup rp = conservation_setup();
    rp.density.kind = DensityKind::bump_power;
    rp.density.sigma = 6.5;
    rp.density.width = 1.0;
    rp.density.center = Vec(1, 1.0);
    rp.solver.end_time = 0.03;
    rp.solver.output_stride = 1.25e-4;
    BuiltRun built = build_run(rp);
    Solver solver(built.init, built.flow, rp.params, rp.solver);
    DiagnosticsSeries series;
    Recorder rec(series, rp.n, rp.m, rp.solver.vacuum_floor);
    solver.run({rec.observer()});
    double vres = 0;
    for (const auto& r : series.rows()) vres = std::max(vres, r.vacuum_residual);

    double dt = seconds_since(t0);
    bool ok = wmax <= 1e-12 && vres <= 1e-6;
    record("6. vacuum invariants (zero-density exactness, patch residual)", ok,
           "max|w| " + fmt(wmax) + ", residual " + fmt(vres) + ", " + fmt(dt) + " s");
}

void criterion_7_blowup_prediction() {
    auto t0 = std::chrono::steady_clock::now();
    RunSetup rs;
    rs.params = p0_params();
    rs.params.kappa = 0.25;
    rs.grid = Grid(1, 1024, 8.0);
    rs.density.kind = DensityKind::gaussian;
    rs.density.eps1 = 1e-3;
    rs.density.width = 0.25;
    rs.velocity.A = Mat::identity(1);
    rs.velocity.eps2 = 2.0;
    rs.velocity.pert = PerturbKind::slope_well;  // slope exactly -1 at x = 2.5
    rs.velocity.pert_width = 0.4;
    rs.velocity.pert_center = Vec(1, 2.5);
    rs.velocity.enforce_gap = false;
    rs.solver.end_time = 2.0;
    rs.solver.output_stride = 0.01;
    rs.solver.grad_threshold = 200.0;
    BuiltRun built = build_run(rs);

    // oracle: singular time from the vacuum-set Jacobians
    std::vector<Mat> vac_grads;
    for (long p = 0; p < rs.grid.points(); ++p)
        if (built.rho0.at(0, p) < 1e-12)
            vac_grads.push_back(built.velocity.analytic.grad_u0(rs.grid.point(p)));
    double t_star = singular_time(vac_grads);

    Solver solver(built.init, built.flow, rs.params, rs.solver);
    Trajectory traj = solver.run({});
    double dt = seconds_since(t0);
    bool ok = traj.halt.code == HaltReason::gradient_threshold && traj.halt.t >= 0.9 &&
              traj.halt.t <= 1.1 && std::abs(t_star - 1.0) <= 0.01 && dt < 120.0;
    record("7. finite-time blow-up detected at the predicted time", ok,
           "halt t " + fmt(traj.halt.t) + ", oracle t* " + fmt(t_star) + ", " + fmt(dt) + " s");
}

void criterion_8_decay_envelope() {
    auto t0 = std::chrono::steady_clock::now();
    RunSetup rs;
    rs.params = p0_params();
    rs.grid = Grid(1, 4096, 16.0);
    rs.density.kind = DensityKind::gaussian;
    rs.density.eps1 = 1e-4;
    rs.density.width = 0.08;
    rs.velocity.A = Mat::diag(1, 0.5);
    rs.velocity.kappa = 0.2;
    rs.solver.end_time = 50.0;
    rs.solver.output_stride = 0.25;

    RegimeReport rep = derived_constants(rs.params, rs.n, rs.m);
    DecayPrediction pred = predicted_decay(rep);

    BuiltRun built = build_run(rs);
    Solver solver(built.init, built.flow, rs.params, rs.solver);
    DiagnosticsSeries series;
    Recorder rec(series, rs.n, rs.m, rs.solver.vacuum_floor);
    Trajectory traj = solver.run({rec.observer()});

    auto [slope, serr] = fit_decay(series.times(), series.column("Z"), 1.0, 50.0);
    OdeSpec spec = regime_ode_spec(rep);
    EnvelopeResult env = envelope_check(series.times(), series.column("Z"), spec, 0.1);

    double dt = seconds_since(t0);
    bool ok = traj.halt.code == HaltReason::completed && slope <= pred.z_exp + 0.5 &&
              env.verdict == EnvelopeVerdict::bounded_by && dt < 300.0;
    record("8. weighted-energy decay respects the predicted envelope", ok,
           "Z slope " + fmt(slope) + " vs bound " + fmt(pred.z_exp + 0.5) + ", envelope " +
               (env.verdict == EnvelopeVerdict::bounded_by ? "bounded" : "violated") + ", " +
               fmt(dt) + " s (stderr " + fmt(serr) + ")");
}

void criterion_9_picard_contraction() {
    auto t0 = std::chrono::steady_clock::now();
    RunSetup rs;
    rs.params = p0_params();
    rs.grid = Grid(1, 256, 4.0);
    rs.density.kind = DensityKind::gaussian;
    rs.density.eps1 = 5e-3;
    rs.density.width = 0.3;
    rs.velocity.A = Mat::identity(1);
    rs.velocity.kappa = 0.25;
    rs.solver.end_time = 0.15;
    rs.solver.output_stride = 0.15;

    BuiltRun built = build_run(rs);
    PicardResult pr = picard_solve(built.init, built.flow, rs.params, rs.solver, 4);
    bool contracting = pr.ratios.size() >= 3;
    for (double r : pr.ratios) contracting = contracting && r < 1.0;

    // self-convergence error of the direct scheme: N vs 2N restricted
    BuiltRun b1 = build_run(rs);
    Solver direct(b1.init, b1.flow, rs.params, rs.solver);
    direct.run({});
    RunSetup rs2 = rs;
    rs2.grid = Grid(1, 512, 4.0);
    BuiltRun b2 = build_run(rs2);
    Solver direct2(b2.init, b2.flow, rs2.params, rs2.solver);
    direct2.run({});
    double self_err2 = 0, pic_err2 = 0;
    const Grid& gc = rs.grid;
    double hd = gc.spacing();
    for (long p = 0; p < gc.points(); ++p) {
        double dphi = direct.state().phi.at(0, p) - direct2.state().phi.at(0, 2 * p);
        double dwv = direct.state().w.at(0, p) - direct2.state().w.at(0, 2 * p);
        double dvp = direct.state().varphi.at(0, p) - direct2.state().varphi.at(0, 2 * p);
        self_err2 += (dphi * dphi + dwv * dwv + dvp * dvp) * hd;
        double pphi = pr.final_state.phi.at(0, p) - direct.state().phi.at(0, p);
        double pw = pr.final_state.w.at(0, p) - direct.state().w.at(0, p);
        double pv = pr.final_state.varphi.at(0, p) - direct.state().varphi.at(0, p);
        pic_err2 += (pphi * pphi + pw * pw + pv * pv) * hd;
    }
    double self_err = std::sqrt(self_err2), pic_err = std::sqrt(pic_err2);
    double dt = seconds_since(t0);
    std::string ratios;
    for (double r : pr.ratios) ratios += " " + fmt(r);
    bool ok = contracting && pic_err <= 10.0 * self_err;
    record("9. linearized iteration contracts and agrees with the direct mode", ok,
           "ratios" + ratios + ", picard err " + fmt(pic_err) + " vs 10x self " +
               fmt(10.0 * self_err) + ", " + fmt(dt) + " s");
}

void criterion_10_r_independence() {
    auto t0 = std::chrono::steady_clock::now();
    RunSetup rs;
    rs.params.gamma = 3;
    rs.params.delta = 3;
    rs.params.alpha = 1;
    rs.params.beta = 0;
    rs.params.kappa = 0.25;
    rs.params.dim = 1;
    rs.grid = Grid(1, 2048, 200.0);
    rs.density.kind = DensityKind::gaussian;
    rs.density.eps1 = 1e-3;
    rs.density.width = 3.0;
    rs.velocity.A = Mat::identity(1);
    rs.velocity.kappa = 0.25;
    rs.solver.end_time = 10.0;
    rs.solver.output_stride = 0.1;

    double lo = 1e300, hi = -1e300;
    std::string detail;
    bool completed = true;
    for (double R : {2.0, 4.0, 8.0}) {
        RunSetup rr = rs;
        rr.cutoff_radius = R;
        BuiltRun built = build_run(rr);
        Solver solver(built.init, built.flow, rr.params, rr.solver);
        DiagnosticsSeries series;
        Recorder rec(series, rr.n, rr.m, rr.solver.vacuum_floor);
        Trajectory traj = solver.run({rec.observer()});
        completed = completed && traj.halt.code == HaltReason::completed;
        auto [slope, serr] = fit_decay(series.times(), series.column("Z"), 1.0, 10.0);
        (void)serr;
        lo = std::min(lo, slope);
        hi = std::max(hi, slope);
        detail += " R" + fmt(R) + ":" + fmt(slope);
    }
    double dt = seconds_since(t0);
    bool ok = completed && (hi - lo) <= 0.1;
    record("10. decay slopes independent of the cutoff radius", ok,
           "spread " + fmt(hi - lo) + "," + detail + ", " + fmt(dt) + " s");
}

void criterion_11_discrete_identity() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    double worst_excess = 0;
    int done = 0;
    for (int trial = 0; trial < 20; ++trial) {
        int d = 1 + trial % 2;
        std::mt19937 rng(1000 + trial);
        Grid g(d, 128, 1.0);
        Field phi = testutil::random_smooth_scalar(g, rng, 2);
        Field w = testutil::random_smooth_vector(g, rng, 2);
        IdentityCheck c = discrete_identity_check(phi, w);
        double slack = 0.02 * (c.rhs + std::abs(c.jstar)) + 1e-12;
        worst_excess = std::max(worst_excess, c.lhs - (c.rhs + c.jstar));
        ok = ok && (c.lhs <= c.rhs + c.jstar + slack);
        ++done;
    }
    double dt = seconds_since(t0);
    record("11. weighted divergence/gradient inequality on random fields",
           ok && done == 20, "worst lhs-(rhs+J*) " + fmt(worst_excess) + ", " + fmt(dt) + " s");
}

void criterion_12_regime_algebra() {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool ok = true;
    double worst = 0;
    int p0_seen = 0;
    for (int i = 0; i < 100; ++i) {
        Params p;
        p.gamma = 1.05 + 2.0 * u(rng);
        p.delta = 1.05 + 2.0 * u(rng);
        p.alpha = 0.1 + 2.0 * u(rng);
        p.beta = -2.0 * p.alpha / 3.0 + (5.0 * p.alpha / 3.0) * (0.01 + 0.99 * u(rng));
        RegimeReport rep = derived_constants(p, 2.5, 3.0);
        if (rep.division_degenerate) continue;
        double lhs = regime_F(p.delta * rep.M1, p.delta, rep.M1);
        double rhs = 4.0 * rep.M1 * p.delta - 6.0 * p.delta + 4.0;
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
        ok = ok && std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs));
        // branch consistency of the decay weights
        ok = ok && std::abs(std::min(rep.b_m, rep.d_star) - rep.b_star) <=
                       1e-13 * (1.0 + std::abs(rep.b_star));
        if (rep.holds_P0) {
            ++p0_seen;
            ok = ok && rep.eps_star > 0 && rep.nu_star > 0 && rep.nu_star < 1 && rep.b_star > 1;
        }
    }
    record("12. regime algebra identities on 100 random draws", ok && p0_seen > 0,
           "max identity err " + fmt(worst) + ", P0 draws " + std::to_string(p0_seen));
}

} // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    guarded("1. background flow matches the linear closed form", criterion_1_background_exactness);
    guarded("2. background decay exponents within 0.15", criterion_2_background_decay);
    guarded("3. comparison-ODE integrator against the closed form", criterion_3_ode_oracle);
    guarded("4. mass/momentum drift below 1e-6 on [0,1]", criterion_4_conservation);
    guarded("5. kinetic-energy lower bound at every stride", criterion_5_kinetic_bound);
    guarded("6. vacuum invariants (zero-density exactness, patch residual)",
            criterion_6_vacuum_invariant);
    guarded("7. finite-time blow-up detected at the predicted time", criterion_7_blowup_prediction);
    guarded("8. weighted-energy decay respects the predicted envelope", criterion_8_decay_envelope);
    guarded("9. linearized iteration contracts and agrees with the direct mode",
            criterion_9_picard_contraction);
    guarded("10. decay slopes independent of the cutoff radius", criterion_10_r_independence);
    guarded("11. weighted divergence/gradient inequality on random fields",
            criterion_11_discrete_identity);
    guarded("12. regime algebra identities on 100 random draws", criterion_12_regime_algebra);
    std::printf("----------------\n%s (%d failure%s)\n", failures == 0 ? "ALL PASS" : "FAILURES",
                failures, failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}
