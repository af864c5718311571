#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "nsvac/diagnostics.hpp"
#include "nsvac/norms.hpp"
#include "nsvac/run_setup.hpp"
#include "test_util.hpp"

using namespace nsvac;

namespace {

Solver::Physical physical_from(const Grid& g, const Field& rho, const Field& u) {
    return Solver::Physical{rho, u, rho, 0.0};
}

} // namespace

TEST_CASE("conserved quantities") {
    Grid g(1, 64, 2.0);
    SUBCASE("zero density gives zero everything") {
        ConservedQuantities c = conserved(physical_from(g, Field::scalar(g), Field::vector(g)));
        CHECK(c.mass == 0.0);
        CHECK(c.kinetic == 0.0);
        CHECK(c.momentum.norm() == 0.0);
    }
    SUBCASE("quadrature sums are translation invariant under a grid shift") {
        std::mt19937 rng(3);
        Field rho = Field::scalar(g), u = Field::vector(g);
        for (long p = 0; p < g.points(); ++p) {
            rho.at(0, p) = 1.0 + 0.5 * std::sin(M_PI * g.point(p)[0] / g.extent);
            u.at(0, p) = std::cos(M_PI * g.point(p)[0] / g.extent);
        }
        ConservedQuantities a = conserved(physical_from(g, rho, u));
        Field rho2 = rho, u2 = u;
        const int shift = 7;
        for (long p = 0; p < g.points(); ++p) {
            rho2.at(0, (p + shift) % g.points()) = rho.at(0, p);
            u2.at(0, (p + shift) % g.points()) = u.at(0, p);
        }
        ConservedQuantities b = conserved(physical_from(g, rho2, u2));
        CHECK(a.mass == doctest::Approx(b.mass).epsilon(1e-14));
        CHECK(a.kinetic == doctest::Approx(b.kinetic).epsilon(1e-14));
        CHECK(a.momentum[0] == doctest::Approx(b.momentum[0]).epsilon(1e-14));
        (void)rng;
    }
    SUBCASE("Cauchy-Schwarz chain is an identity of the sums") {
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> ur(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            Field rho = Field::scalar(g), u = Field::vector(g);
            for (long p = 0; p < g.points(); ++p) {
                rho.at(0, p) = ur(rng);
                u.at(0, p) = 2.0 * ur(rng) - 1.0;
            }
            CHECK_NOTHROW(conserved(physical_from(g, rho, u)));
        }
    }
}

TEST_CASE("kinetic energy lower bound") {
    DiagnosticsSeries s;
    SUBCASE("not applicable without initial momentum") {
        DiagRow r;
        r.t = 0;
        r.mass = 1;
        r.momentum = Vec(1, 0.0);
        r.kinetic = 1;
        s.add(r);
        CHECK_FALSE(kinetic_lower_bound(s).applicable);
    }
    SUBCASE("violation is located") {
        DiagRow r;
        r.t = 0;
        r.mass = 2;
        r.momentum = Vec(1, 2.0);
        r.kinetic = 1.0;  // bound = |P|^2/(2m) = 1 exactly
        r.u_linf = 1.0;
        s.add(r);
        DiagRow r2 = r;
        r2.t = 1;
        r2.kinetic = 0.5;  // dips below
        s.add(r2);
        KineticBoundVerdict v = kinetic_lower_bound(s);
        CHECK(v.applicable);
        CHECK_FALSE(v.ok);
        CHECK(v.t_fail == 1.0);
    }
}

TEST_CASE("weighted energy") {
    Grid g(1, 64, 2.0);
    SUBCASE("zero state") {
        ReformState s = ReformState::zero(g);
        WeightedEnergy we = weighted_energy(s, 2.5, 3.0);
        CHECK(we.Z == 0.0);
    }
    SUBCASE("unit weights at t = 0 and linearity in the data") {
        std::mt19937 rng(5);
        ReformState s = ReformState::zero(g);
        s.varphi = testutil::random_smooth_scalar(g, rng, 2, 0.1);
        s.phi = testutil::random_smooth_scalar(g, rng, 2, 0.1);
        s.w = testutil::random_smooth_vector(g, rng, 2, 0.1);
        WeightedEnergy we = weighted_energy(s, 2.5, 3.0);
        double sum = 0;
        for (int k = 0; k < 4; ++k)
            sum += we.Yk[static_cast<size_t>(k)] * we.Yk[static_cast<size_t>(k)] +
                   we.Uk[static_cast<size_t>(k)] * we.Uk[static_cast<size_t>(k)];
        CHECK(we.Z * we.Z == doctest::Approx(sum).epsilon(1e-12));

        ReformState s2 = s;
        s2.varphi *= 2.0;
        s2.phi *= 2.0;
        s2.w *= 2.0;
        WeightedEnergy we2 = weighted_energy(s2, 2.5, 3.0);
        CHECK(we2.Z == doctest::Approx(2.0 * we.Z).epsilon(1e-12));
    }
}

TEST_CASE("decay fitting") {
    SUBCASE("exact power law") {
        std::vector<double> t, v;
        for (int i = 0; i <= 40; ++i) {
            double ti = std::pow(10.0, 2.0 * i / 40.0) - 0.5;
            t.push_back(ti);
            v.push_back(std::pow(1.0 + ti, -2.0));
        }
        auto [slope, err] = fit_decay(t, v, 0.0, 1e3);
        CHECK(slope == doctest::Approx(-2.0).epsilon(1e-10));
        CHECK(err <= 1e-10);
    }
    SUBCASE("log-oscillating perturbation stays within 0.02") {
        std::vector<double> t, v;
        for (int i = 0; i <= 60; ++i) {
            double ti = std::pow(10.0, 2.0 * i / 60.0) - 0.9;
            t.push_back(ti);
            v.push_back(3.0 * std::pow(1.0 + ti, -2.0) *
                        (1.0 + 0.01 * std::sin(std::log(1.0 + ti))));
        }
        auto [slope, err] = fit_decay(t, v, 0.0, 1e3);
        CHECK(std::abs(slope + 2.0) <= 0.02);
        (void)err;
    }
    SUBCASE("window with too few points is rejected") {
        std::vector<double> t{1, 2, 3}, v{1, 1, 1};
        CHECK_THROWS_AS(fit_decay(t, v, 0.0, 10.0), FitDegenerate);
    }
}

TEST_CASE("blowup monitor and support tracker on synthetic series") {
    DiagnosticsSeries s;
    for (int i = 0; i <= 10; ++i) {
        DiagRow r;
        r.t = 0.1 * i;
        r.mass = 1;
        r.grad_u_linf = (i >= 7) ? 300.0 : 1.0;
        r.dt = (i >= 9) ? 1e-12 : 1e-3;
        s.add(r);
    }
    auto events = blowup_monitor(s, 100.0, 1e-9);
    REQUIRE(events.size() == 2);
    CHECK(events[0].kind == "grad_threshold");
    CHECK(events[0].t == doctest::Approx(0.7));
    CHECK(events[1].kind == "dt_collapse");

    Snapshot snap;
    snap.support_radius = 1.0;
    snap.support_envelope = 1.2;
    CHECK(support_tracker(snap, 4.0, 0.01).ok);
    snap.support_envelope = 3.99;
    CHECK_FALSE(support_tracker(snap, 4.0, 0.01).ok);
}

TEST_CASE("recorder fills a consistent series on a real run") {
    RunSetup rs;
    rs.params.gamma = 3;
    rs.params.delta = 3;
    rs.params.dim = 1;
    rs.grid = Grid(1, 256, 6.0);
    rs.density.kind = DensityKind::gaussian;
    rs.density.eps1 = 1e-3;
    rs.density.width = 0.4;
    rs.density.center = Vec(1, 0.5);
    rs.velocity.A = Mat::identity(1);
    rs.solver.end_time = 0.3;
    rs.solver.output_stride = 0.01;
    BuiltRun built = build_run(rs);
    Solver solver(built.init, built.flow, rs.params, rs.solver);
    DiagnosticsSeries series;
    Recorder rec(series, rs.n, rs.m, rs.solver.vacuum_floor);
    Trajectory traj = solver.run({rec.observer()});
    REQUIRE(traj.halt.code == HaltReason::completed);
    REQUIRE(series.rows().size() >= 25);

    // strictly increasing timestamps, momentum carried, vacuum residual small
    const auto& rows = series.rows();
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].t > rows[i - 1].t);
    CHECK(rows.front().momentum[0] > 0);  // density off-center against u = x
    double m0 = rows.front().mass;
    for (const auto& r : rows) CHECK(std::abs(r.mass - m0) <= 1e-8 * m0);
    // residual is dominated by the stride^2 backward-difference error of the
    // background; at stride 0.01 and |x| <= 6 that is a few times 1e-3
    double vres = 0;
    for (const auto& r : rows) vres = std::max(vres, r.vacuum_residual);
    CHECK(vres <= 5e-3);
    KineticBoundVerdict kb = kinetic_lower_bound(series);
    CHECK(kb.applicable);
    CHECK(kb.ok);

    // csv has a row per stride and the declared column count
    std::string csv = series.csv();
    size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == rows.size() + 1);
}
