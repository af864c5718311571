// Command-line laboratory: regime reports, background-flow decay studies,
// comparison-ODE thresholds, simulations (direct and linearized-iteration
// modes), cutoff-radius sweeps and run reports.

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nsvac/norms.hpp"
#include "nsvac/run_setup.hpp"
#include "nsvac/serialize.hpp"

namespace fs = std::filesystem;
using namespace nsvac;

namespace {

struct CliContext {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
};

KeyValueConfig load_config(const CliContext& ctx) {
    KeyValueConfig cfg = ctx.config_path.empty() ? KeyValueConfig()
                                                 : KeyValueConfig::parse_file(ctx.config_path);
    for (const auto& ov : ctx.overrides) cfg.apply_override(ov);
    return cfg;
}

fs::path make_out_dir(const CliContext& ctx, const std::string& verb) {
    fs::path dir;
    if (!ctx.out_dir.empty()) {
        dir = ctx.out_dir;
    } else {
        char stamp[32];
        std::time_t now = std::time(nullptr);
        std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", std::localtime(&now));
        dir = fs::path("runs") / (verb + "-" + stamp);
    }
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << text;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_regime(const CliContext& ctx) {
    KeyValueConfig cfg = load_config(ctx);
    RunSetup rs = load_setup(cfg);
    fs::path dir = make_out_dir(ctx, "regime");
    to_config(rs).save((dir / "config.resolved").string());

    auto violations = validate(rs.params);
    if (!violations.empty()) {
        std::ostringstream os;
        for (const auto& v : violations) os << "violated: " << v << "\n";
        write_text(dir / "violations.txt", os.str());
        std::cerr << os.str();
        return 2;
    }

    RegimeReport rep = derived_constants(rs.params, rs.n, rs.m);
    write_text(dir / "regime.txt", report_text(rep));
    write_text(dir / "regime.csv", report_csv_header() + "\n" + report_csv_row(rep) + "\n");

    std::ostringstream pred_csv;
    pred_csv << "path,k,Y_exponent,U_exponent,Z_exponent,K_a_iota_eta,eta\n";
    try {
        DecayPrediction pred = predicted_decay(rep);
        for (int k = 0; k < 4; ++k)
            pred_csv << to_string(pred.path) << ',' << k << ','
                     << fmt(pred.y_exp[static_cast<size_t>(k)]) << ','
                     << fmt(pred.u_exp[static_cast<size_t>(k)]) << ',' << fmt(pred.z_exp) << ','
                     << fmt(pred.K_a_iota_eta) << ',' << fmt(pred.eta) << "\n";
    } catch (const NoActiveRegime&) {
        pred_csv << "none,,,,,,\n";
    }
    write_text(dir / "decay_prediction.csv", pred_csv.str());

    // scale sweep: alpha = a1 eta, beta = a2 eta leaves M1 untouched
    std::ostringstream sweep;
    sweep << "eta,alpha,beta,M1\n";
    for (double eta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        Params q = rs.params;
        q.alpha *= eta;
        q.beta *= eta;
        RegimeReport r2 = classify(q);
        sweep << fmt(eta) << ',' << fmt(q.alpha) << ',' << fmt(q.beta) << ','
              << (r2.division_degenerate ? "n/a" : fmt(r2.M1)) << "\n";
    }
    write_text(dir / "m1_sweep.csv", sweep.str());
    std::cout << report_text(rep);
    return 0;
}

int cmd_burgers(const CliContext& ctx) {
    KeyValueConfig cfg = load_config(ctx);
    RunSetup rs = load_setup(cfg);
    fs::path dir = make_out_dir(ctx, "burgers");
    to_config(rs).save((dir / "config.resolved").string());

    VelocityData vel = build_velocity(rs.velocity, rs.grid, rs.params);
    BurgersFlow flow(vel.analytic);

    const double t0 = cfg.get_double_or("burgers.t0", 0.5);
    const double t1 = cfg.get_double_or("burgers.t1", 100.0);
    const int samples = static_cast<int>(cfg.get_int_or("burgers.samples", 25));
    std::vector<double> ts;
    for (int i = 0; i < samples; ++i)
        ts.push_back(t0 * std::pow(t1 / t0, static_cast<double>(i) / (samples - 1)));

    DecayReport rep = decay_report(flow, 2, 3, ts, rs.grid, rs.fit_t0, rs.fit_t1);
    write_text(dir / "decay.csv", rep.csv());

    std::ostringstream sup;
    sup << "t,sup_K\n";
    for (double t : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4}) {
        double m = 0;
        for (long p = 0; p < rs.grid.points(); ++p)
            m = std::max(m, flow.k_matrix(t, rs.grid.point(p)).maxabs());
        sup << fmt(t) << ',' << fmt(m) << "\n";
    }
    write_text(dir / "kmatrix_sup.csv", sup.str());

    std::ostringstream sum;
    sum << "min_kappa_distance " << fmt(vel.min_kappa_distance) << "\n";
    for (const auto& s : rep.slopes)
        sum << s.quantity << " predicted " << fmt(s.predicted) << " fitted " << fmt(s.fitted)
            << " stderr " << fmt(s.stderr_) << "\n";
    write_text(dir / "summary.txt", sum.str());
    std::cout << sum.str();
    return 0;
}

int cmd_ode(const CliContext& ctx) {
    KeyValueConfig cfg = load_config(ctx);
    fs::path dir = make_out_dir(ctx, "ode");
    cfg.save((dir / "config.resolved").string());

    OdeSpec spec;
    spec.a = cfg.get_double_or("ode.a", 2.0);
    spec.b = cfg.get_double_or("ode.b", 2.0);
    spec.C1 = cfg.get_double_or("ode.C1", 1.0);
    spec.C2 = cfg.get_double_or("ode.C2", 0.0);
    spec.D1 = cfg.get_double_or("ode.D1", 0.0);
    spec.D2 = cfg.get_double_or("ode.D2", -2.0);
    spec.Z0 = cfg.get_double_or("ode.Z0", 0.5);
    const double t_end = cfg.get_double_or("ode.t_end", 100.0);
    const double rtol = cfg.get_double_or("ode.rtol", 1e-10);

    std::ostringstream traj;
    traj << "t,closed_form,integrated\n";
    OdeTrajectory num = integrate(spec, t_end, rtol);
    bool closed_blow = false;
    for (size_t i = 0; i < num.t.size(); ++i) {
        OdeValue cv = closed_form(spec, num.t[i]);
        if (cv.blowup) {
            closed_blow = true;
            break;
        }
        traj << fmt(num.t[i]) << ',' << fmt(cv.value) << ',' << fmt(num.z[i]) << "\n";
    }
    write_text(dir / "trajectory.csv", traj.str());

    std::ostringstream sum;
    if (num.blowup || closed_blow) {
        OdeValue bv = blowup_time(spec, 10 * t_end + 10);
        sum << "blowup at t " << fmt(bv.t_blow) << "\n";
    }
    try {
        Threshold th = threshold_lambda(spec);
        sum << "lambda " << fmt(th.lambda) << "\nJ_inf " << fmt(th.J_inf) << "\nerror_estimate "
            << fmt(th.error_estimate) << "\n";
    } catch (const HypothesesViolated& e) {
        sum << "lambda n/a (" << e.which << ")\n";
    }
    write_text(dir / "threshold.txt", sum.str());
    std::cout << sum.str();
    return 0;
}

int run_simulation(const RunSetup& rs, const fs::path& dir) {
    BuiltRun built = build_run(rs);
    RegimeReport rep = derived_constants(rs.params, rs.n, rs.m);
    const double d0 = rs.D0 > 0 ? rs.D0 : default_D0(rep);
    SmallnessReport sm = smallness_report(built.init, d0, rep.holds_P2);

    Solver solver(built.init, built.flow, rs.params, rs.solver);
    DiagnosticsSeries series;
    Recorder rec(series, rs.n, rs.m, rs.solver.vacuum_floor);
    Trajectory traj = solver.run({rec.observer()});

    write_text(dir / "diagnostics.csv", series.csv());
    write_text(dir / "halt.txt", traj.halt.text() + "\n");
    {
        std::ostringstream os;
        os << "t,dt\n";
        for (auto& [t, dt] : traj.dt_log) os << fmt(t) << ',' << fmt(dt) << "\n";
        write_text(dir / "dt_log.csv", os.str());
    }
    write_field((dir / "final_varphi.field").string(), solver.state().varphi, solver.state().t);
    write_field((dir / "final_phi.field").string(), solver.state().phi, solver.state().t);
    write_field((dir / "final_w.field").string(), solver.state().w, solver.state().t);

    std::ostringstream os;
    os << "smallness phi_h3 " << fmt(sm.phi_h3) << " varphi_h3 " << fmt(sm.varphi_h3) << " D0 "
       << fmt(sm.D0) << " within " << sm.within << "\n";
    os << traj.halt.text() << "\n";
    const auto& rows = series.rows();
    if (rows.size() >= 2) {
        double m0 = rows.front().mass;
        double drift = 0;
        for (const auto& r : rows) drift = std::max(drift, std::abs(r.mass - m0));
        os << "mass_drift_rel " << fmt(m0 != 0 ? drift / std::abs(m0) : drift) << "\n";
        try {
            auto [zslope, zerr] = fit_decay(series.times(), series.column("Z"), rs.fit_t0,
                                            std::min(rs.fit_t1, rows.back().t));
            os << "Z_slope " << fmt(zslope) << " stderr " << fmt(zerr) << "\n";
            DecayPrediction pred = predicted_decay(rep);
            os << "Z_slope_predicted " << fmt(pred.z_exp) << "\n";
        } catch (const Error& e) {
            os << "Z_slope n/a (" << e.what() << ")\n";
        }
    }
    write_text(dir / "report.txt", os.str());
    std::cout << os.str();
    return traj.halt.is_blowup() ? 3 : 0;
}

int cmd_simulate(const CliContext& ctx) {
    KeyValueConfig cfg = load_config(ctx);
    RunSetup rs = load_setup(cfg);
    fs::path dir = make_out_dir(ctx, "simulate");
    to_config(rs).save((dir / "config.resolved").string());
    return run_simulation(rs, dir);
}

int cmd_picard(const CliContext& ctx) {
    KeyValueConfig cfg = load_config(ctx);
    RunSetup rs = load_setup(cfg);
    fs::path dir = make_out_dir(ctx, "picard");
    to_config(rs).save((dir / "config.resolved").string());

    BuiltRun built = build_run(rs);
    PicardResult pr = picard_solve(built.init, built.flow, rs.params, rs.solver, rs.picard_kmax);

    std::ostringstream os;
    os << "k,gamma,ratio\n";
    for (size_t k = 0; k < pr.gamma.size(); ++k)
        os << (k + 1) << ',' << fmt(pr.gamma[k]) << ','
           << (k > 0 ? fmt(pr.ratios[k - 1]) : std::string("")) << "\n";
    write_text(dir / "contraction.csv", os.str());

    // limit vs direct mode at the same resolution
    BuiltRun built2 = build_run(rs);
    Solver direct(built2.init, built2.flow, rs.params, rs.solver);
    direct.run({});
    Field dphi = pr.final_state.phi - direct.state().phi;
    Field dw = pr.final_state.w - direct.state().w;
    Field dv = pr.final_state.varphi - direct.state().varphi;
    double diff = std::sqrt(inner(dphi, dphi) + inner(dw, dw) + inner(dv, dv));
    std::ostringstream sum;
    sum << "iterates " << pr.iterates << "\nsteps " << pr.steps << "\ndt " << fmt(pr.dt) << "\n";
    for (size_t k = 0; k < pr.ratios.size(); ++k)
        sum << "ratio_" << (k + 2) << " " << fmt(pr.ratios[k]) << "\n";
    sum << "picard_vs_direct_l2 " << fmt(diff) << "\n";
    write_text(dir / "summary.txt", sum.str());
    std::cout << sum.str();
    return 0;
}

int cmd_rstudy(const CliContext& ctx) {
    KeyValueConfig cfg = load_config(ctx);
    RunSetup rs = load_setup(cfg);
    fs::path dir = make_out_dir(ctx, "rstudy");
    to_config(rs).save((dir / "config.resolved").string());

    std::vector<double> radii;
    {
        std::istringstream is(cfg.get_string_or("rstudy.radii", "2 4 8"));
        double r;
        while (is >> r) radii.push_back(r);
    }

    std::ostringstream table;
    table << "R,Z_slope,stderr,mass_drift_rel\n";
    double lo = 1e300, hi = -1e300, max_err = 0;
    for (double R : radii) {
        RunSetup rr = rs;
        rr.cutoff_radius = R;
        BuiltRun built = build_run(rr);
        Solver solver(built.init, built.flow, rr.params, rr.solver);
        DiagnosticsSeries series;
        Recorder rec(series, rr.n, rr.m, rr.solver.vacuum_floor);
        Trajectory traj = solver.run({rec.observer()});
        if (traj.halt.code != HaltReason::completed)
            throw Error("rstudy run halted early: " + traj.halt.text());
        auto [slope, err] = fit_decay(series.times(), series.column("Z"), rr.fit_t0,
                                      std::min(rr.fit_t1, series.rows().back().t));
        double m0 = series.rows().front().mass, drift = 0;
        for (const auto& row : series.rows())
            drift = std::max(drift, std::abs(row.mass - m0) / std::abs(m0));
        table << fmt(R) << ',' << fmt(slope) << ',' << fmt(err) << ',' << fmt(drift) << "\n";
        lo = std::min(lo, slope);
        hi = std::max(hi, slope);
        max_err = std::max(max_err, err);
    }
    write_text(dir / "rstudy.csv", table.str());
    double spread = hi - lo;
    std::ostringstream sum;
    sum << "slope_spread " << fmt(spread) << "\nmax_stderr " << fmt(max_err) << "\n";
    write_text(dir / "summary.txt", sum.str());
    std::cout << table.str() << sum.str();
    if (spread > 3 * std::max(max_err, 1e-3) && spread > 0.1) return 4;
    return 0;
}

int cmd_report(const CliContext& ctx) {
    if (ctx.out_dir.empty()) throw ConfigError("report needs --out pointing at a run directory");
    fs::path dir = ctx.out_dir;
    std::ifstream f(dir / "diagnostics.csv");
    if (!f) throw ConfigError("no diagnostics.csv under " + dir.string());
    std::string header;
    std::getline(f, header);
    std::vector<std::string> cols;
    {
        std::istringstream is(header);
        std::string c;
        while (std::getline(is, c, ',')) cols.push_back(c);
    }
    std::vector<std::vector<double>> data(cols.size());
    std::string line;
    while (std::getline(f, line)) {
        std::istringstream is(line);
        std::string c;
        size_t i = 0;
        while (std::getline(is, c, ',') && i < cols.size()) data[i++].push_back(std::stod(c));
    }
    auto col = [&](const std::string& name) -> const std::vector<double>& {
        for (size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return data[i];
        throw ConfigError("column missing: " + name);
    };
    std::ostringstream os;
    const auto& t = col("t");
    const auto& mass = col("mass");
    if (!mass.empty() && mass.front() != 0) {
        double drift = 0;
        for (double m : mass) drift = std::max(drift, std::abs(m - mass.front()));
        os << "mass_drift_rel " << fmt(drift / std::abs(mass.front())) << "\n";
    }
    for (const char* q : {"Z", "Y", "U"}) {
        try {
            auto [s, e] = fit_decay(t, col(q), 1.0, t.empty() ? 1.0 : t.back());
            os << q << "_slope " << fmt(s) << " stderr " << fmt(e) << "\n";
        } catch (const Error&) {
        }
    }
    double vmax = 0;
    for (double v : col("vacuum_residual")) vmax = std::max(vmax, v);
    os << "vacuum_residual_max " << fmt(vmax) << "\n";
    write_text(dir / "report.txt", os.str());
    std::cout << os.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for degenerate-viscosity compressible flow with vacuum"};
    app.require_subcommand(1);
    app.fallthrough();

    CliContext ctx;
    app.add_option("--config", ctx.config_path, "run configuration file");
    app.add_option("--out", ctx.out_dir, "output directory (default: runs/<verb>-<stamp>)");
    app.add_option("--override", ctx.overrides, "key=value override, repeatable");

    auto* sc_regime = app.add_subcommand("regime", "parameter admissibility and derived constants");
    auto* sc_burgers = app.add_subcommand("burgers", "background-flow decay study");
    auto* sc_ode = app.add_subcommand("ode", "comparison-ODE trajectories and threshold");
    auto* sc_sim = app.add_subcommand("simulate", "time integration with diagnostics");
    auto* sc_picard = app.add_subcommand("picard", "linearized-iteration contraction study");
    auto* sc_rstudy = app.add_subcommand("rstudy", "cutoff-radius independence sweep");
    auto* sc_report = app.add_subcommand("report", "summarize an existing run directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_regime->parsed()) return cmd_regime(ctx);
        if (sc_burgers->parsed()) return cmd_burgers(ctx);
        if (sc_ode->parsed()) return cmd_ode(ctx);
        if (sc_sim->parsed()) return cmd_simulate(ctx);
        if (sc_picard->parsed()) return cmd_picard(ctx);
        if (sc_rstudy->parsed()) return cmd_rstudy(ctx);
        if (sc_report->parsed()) return cmd_report(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConstraintViolated& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
