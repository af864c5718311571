#include "nsvac/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nsvac/norms.hpp"
#include "nsvac/operators.hpp"

namespace nsvac {

ConservedQuantities conserved(const Solver::Physical& phys) {
    const Grid& g = phys.rho.grid();
    const double hd = std::pow(g.spacing(), g.dim);
    ConservedQuantities out;
    out.momentum = Vec(g.dim);
    double m = 0, ek = 0;
    Vec P(g.dim);
    for (long p = 0; p < g.points(); ++p) {
        double rho = phys.rho.at(0, p);
        double u2 = 0;
        for (int c = 0; c < g.dim; ++c) {
            double u = phys.u.at(c, p);
            P[c] += rho * u;
            u2 += u * u;
        }
        m += rho;
        ek += 0.5 * rho * u2;
    }
    out.mass = m * hd;
    P *= hd;
    out.momentum = P;
    out.kinetic = ek * hd;

    // |P| <= sqrt(2 m Ek) holds for the quadrature sums themselves.
    double bound = std::sqrt(2.0 * std::max(out.mass, 0.0) * std::max(out.kinetic, 0.0));
    if (P.norm() > bound * (1.0 + 1e-12) + 1e-300)
        throw Error("Cauchy-Schwarz chain violated by quadrature sums");
    return out;
}

WeightedEnergy weighted_energy(const ReformState& s, double n, double m, int so) {
    WeightedEnergy out;
    SobolevNorms np = sobolev(s.phi, 3, so);
    SobolevNorms nw = sobolev(s.w, 3, so);
    SobolevNorms nv = sobolev(s.varphi, 3, so);
    double y2 = 0, u2 = 0;
    for (int k = 0; k < 4; ++k) {
        double yk = std::hypot(np.l2[static_cast<size_t>(k)], nw.l2[static_cast<size_t>(k)]);
        double uk = nv.l2[static_cast<size_t>(k)];
        out.Yk[static_cast<size_t>(k)] = yk;
        out.Uk[static_cast<size_t>(k)] = uk;
        y2 += std::pow(1.0 + s.t, 2.0 * (k - n)) * yk * yk;
        u2 += std::pow(1.0 + s.t, 2.0 * (k - m)) * uk * uk;
    }
    out.Y = std::sqrt(y2);
    out.U = std::sqrt(u2);
    out.Z = std::sqrt(y2 + u2);
    double w_linf = std::max(np.linf, nw.linf);
    double denom = std::pow(1.0 + s.t, 0.5 * (2.0 * n - 3.0)) * out.Y;
    out.lemma51_ratio = (denom > 0) ? w_linf / denom : 0.0;
    return out;
}

std::pair<double, double> fit_decay(const std::vector<double>& t,
                                    const std::vector<double>& value, double t0, double t1) {
    std::vector<double> ts, vs;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t0 && t[i] <= t1 && value[i] > 0) {
            ts.push_back(t[i]);
            vs.push_back(value[i]);
        }
    if (ts.size() < 20) throw FitDegenerate("fit_decay needs at least 20 samples in the window");
    return fit_loglog(ts, vs);
}

void DiagnosticsSeries::add(const DiagRow& row) {
    if (!rows_.empty() && !(row.t > rows_.back().t))
        throw Error("diagnostics rows need strictly increasing time stamps");
    rows_.push_back(row);
}

std::vector<double> DiagnosticsSeries::times() const {
    std::vector<double> t;
    t.reserve(rows_.size());
    for (const auto& r : rows_) t.push_back(r.t);
    return t;
}

std::vector<double> DiagnosticsSeries::column(const std::string& name) const {
    std::vector<double> v;
    v.reserve(rows_.size());
    for (const auto& r : rows_) {
        double x = 0;
        if (name == "mass") x = r.mass;
        else if (name == "momentum0") x = r.momentum.d > 0 ? r.momentum[0] : 0;
        else if (name == "momentum1") x = r.momentum.d > 1 ? r.momentum[1] : 0;
        else if (name == "momentum2") x = r.momentum.d > 2 ? r.momentum[2] : 0;
        else if (name == "kinetic") x = r.kinetic;
        else if (name == "u_linf") x = r.u_linf;
        else if (name == "grad_u_linf") x = r.grad_u_linf;
        else if (name == "Y") x = r.Y;
        else if (name == "U") x = r.U;
        else if (name == "Z") x = r.Z;
        else if (name == "lemma51_ratio") x = r.lemma51_ratio;
        else if (name == "vacuum_residual") x = r.vacuum_residual;
        else if (name == "support_radius") x = r.support_radius;
        else if (name == "support_envelope") x = r.support_envelope;
        else if (name == "clamped_total") x = r.clamped_total;
        else if (name == "dual_gap") x = r.dual_gap;
        else if (name == "dt") x = r.dt;
        else if (name.size() == 2 && name[0] == 'Y' && name[1] >= '0' && name[1] <= '3')
            x = r.Yk[static_cast<size_t>(name[1] - '0')];
        else if (name.size() == 2 && name[0] == 'U' && name[1] >= '0' && name[1] <= '3')
            x = r.Uk[static_cast<size_t>(name[1] - '0')];
        else
            throw ConfigError("unknown diagnostics column: " + name);
        v.push_back(x);
    }
    return v;
}

std::string DiagnosticsSeries::csv() const {
    std::ostringstream os;
    os << "t,mass,momentum0,momentum1,momentum2,kinetic,u_linf,grad_u_linf,"
          "Y0,Y1,Y2,Y3,U0,U1,U2,U3,Y,U,Z,lemma51_ratio,vacuum_residual,"
          "support_radius,support_envelope,clamped_step,clamped_total,dual_gap,dt\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << (last ? '\n' : ',');
    };
    for (const auto& r : rows_) {
        put(r.t);
        put(r.mass);
        put(r.momentum.d > 0 ? r.momentum[0] : 0);
        put(r.momentum.d > 1 ? r.momentum[1] : 0);
        put(r.momentum.d > 2 ? r.momentum[2] : 0);
        put(r.kinetic);
        put(r.u_linf);
        put(r.grad_u_linf);
        for (int k = 0; k < 4; ++k) put(r.Yk[static_cast<size_t>(k)]);
        for (int k = 0; k < 4; ++k) put(r.Uk[static_cast<size_t>(k)]);
        put(r.Y);
        put(r.U);
        put(r.Z);
        put(r.lemma51_ratio);
        put(r.vacuum_residual);
        put(r.support_radius);
        put(r.support_envelope);
        put(r.clamped_step);
        put(r.clamped_total);
        put(r.dual_gap);
        put(r.dt, true);
    }
    return os.str();
}

KineticBoundVerdict kinetic_lower_bound(const DiagnosticsSeries& series, double tol) {
    KineticBoundVerdict v;
    const auto& rows = series.rows();
    if (rows.empty()) return v;
    const double P0 = rows.front().momentum.norm();
    const double m0 = rows.front().mass;
    if (!(P0 > 0) || !(m0 > 0)) return v;  // not applicable
    v.applicable = true;
    const double ek_bound = P0 * P0 / (2.0 * m0);
    const double u_bound = P0 / m0;
    v.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        v.margin = std::min(v.margin, r.kinetic - ek_bound);
        if (r.kinetic < ek_bound * (1.0 - tol) || r.u_linf < u_bound * (1.0 - tol)) {
            v.ok = false;
            v.t_fail = r.t;
            return v;
        }
    }
    return v;
}

std::vector<BlowupEvent> blowup_monitor(const DiagnosticsSeries& series, double grad_threshold,
                                        double dt_floor) {
    std::vector<BlowupEvent> events;
    bool grad_fired = false, dt_fired = false;
    for (const auto& r : series.rows()) {
        if (!grad_fired && r.grad_u_linf > grad_threshold) {
            events.push_back({r.t, "grad_threshold", r.grad_u_linf});
            grad_fired = true;
        }
        if (!dt_fired && r.dt > 0 && r.dt < dt_floor) {
            events.push_back({r.t, "dt_collapse", r.dt});
            dt_fired = true;
        }
    }
    return events;
}

SupportStatus support_tracker(const Snapshot& snap, double extent, double spacing) {
    SupportStatus st;
    st.radius = snap.support_radius;
    st.envelope = snap.support_envelope;
    st.ok = std::max(st.radius, st.envelope) + 6.0 * spacing < extent;
    return st;
}

Recorder::Recorder(DiagnosticsSeries& out, double n, double m, double vacuum_floor)
    : out_(&out), n_(n), m_(m), floor_(vacuum_floor) {}

Observer Recorder::observer() {
    return [this](const Solver& s, const Snapshot& snap) { (*this)(s, snap); };
}

void Recorder::operator()(const Solver& solver, const Snapshot& snap) {
    const ReformState& s = snap.state;
    const Grid& g = solver.grid();
    const int d = g.dim;

    DiagRow row;
    row.t = s.t;
    auto phys = solver.to_physical(s);
    auto cq = conserved(phys);
    row.mass = cq.mass;
    row.momentum = cq.momentum;
    row.kinetic = cq.kinetic;
    row.u_linf = phys.u.max_pointwise_norm();
    row.dual_gap = phys.dual_gap;

    auto bg = solver.sample_background(s.t);
    Field gw = gradient(s.w, solver.config().stencil_order);
    double gmax = 0;
    for (int c = 0; c < gw.ncomp(); ++c) {
        const double* a = gw.comp(c);
        const double* b = bg.grad.comp(c);
        for (long p = 0; p < g.points(); ++p) gmax = std::max(gmax, std::abs(a[p] + b[p]));
    }
    row.grad_u_linf = gmax;

    auto we = weighted_energy(s, n_, m_, solver.config().stencil_order);
    row.Yk = we.Yk;
    row.Uk = we.Uk;
    row.Y = we.Y;
    row.U = we.U;
    row.Z = we.Z;
    row.lemma51_ratio = we.lemma51_ratio;

    // vacuum residual from the last three stored snapshots (uniform stride)
    w_hist_.emplace_back(s.t, s.w);
    if (w_hist_.size() > 3) w_hist_.pop_front();
    if (w_hist_.size() == 3) {
        const double t2 = w_hist_[2].first, t1 = w_hist_[1].first, t0 = w_hist_[0].first;
        const double dt1 = t2 - t1, dt0 = t1 - t0;
        if (std::abs(dt1 - dt0) < 1e-9 * (1.0 + std::abs(dt1))) {
            const double dt = dt1;
            auto bg1 = solver.sample_background(t1);
            auto bg0 = solver.sample_background(t0);
            Field gw2 = gradient(w_hist_[2].second, solver.config().stencil_order);
            double res = 0;
            for (long p = 0; p < g.points(); ++p) {
                if (phys.rho.at(0, p) >= floor_) continue;
                double rp2 = 0;
                for (int i = 0; i < d; ++i) {
                    double u2v = w_hist_[2].second.at(i, p) + bg.u.at(i, p);
                    double u1v = w_hist_[1].second.at(i, p) + bg1.u.at(i, p);
                    double u0v = w_hist_[0].second.at(i, p) + bg0.u.at(i, p);
                    double dudt = (3.0 * u2v - 4.0 * u1v + u0v) / (2.0 * dt);
                    double conv = 0;
                    for (int j = 0; j < d; ++j) {
                        double ugrad = gw2.at(i * d + j, p) + bg.grad.at(i * d + j, p);
                        double uj = w_hist_[2].second.at(j, p) + bg.u.at(j, p);
                        conv += uj * ugrad;
                    }
                    double ri = dudt + conv;
                    rp2 += ri * ri;
                }
                res = std::max(res, std::sqrt(rp2));
            }
            row.vacuum_residual = res;
        }
    }

    row.support_radius = snap.support_radius;
    row.support_envelope = snap.support_envelope;
    row.clamped_step = snap.clamped_mass_step;
    row.clamped_total = snap.clamped_mass_total;
    row.dt = snap.dt_last;
    out_->add(row);
}

} // namespace nsvac
