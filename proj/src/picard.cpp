#include "nsvac/picard.hpp"

#include <cmath>

#include "nsvac/norms.hpp"
#include "nsvac/operators.hpp"

namespace nsvac {

namespace {

ReformState lerp_state(const ReformState& a, const ReformState& b, double w) {
    ReformState out = a;
    out.varphi *= (1.0 - w);
    out.phi *= (1.0 - w);
    out.w *= (1.0 - w);
    axpy(w, b.varphi, out.varphi);
    axpy(w, b.phi, out.phi);
    axpy(w, b.w, out.w);
    out.t = (1.0 - w) * a.t + w * b.t;
    return out;
}

struct LinearRhs {
    const Params& params;
    const SolverConfig& config;

    // seed problem: transport by the background alone, w frozen at zero
    StateRate seed(const ReformState& s, const Solver::BackgroundSample& bg) const {
        const Grid& g = s.varphi.grid();
        StateRate r = StateRate::zero(g);
        Field av = advect(s.varphi, bg.u, config.advection, config.stencil_order);
        Field ap = advect(s.phi, bg.u, config.advection, config.stencil_order);
        axpy(-1.0, av, r.varphi);
        axpy(-1.0, ap, r.phi);
        return r;
    }

    // linearized system with coefficients frozen at the previous iterate
    StateRate operator()(const ReformState& s, const ReformState& coeff,
                         const Solver::BackgroundSample& bg) const {
        const Grid& g = s.varphi.grid();
        const int d = g.dim;
        const long npts = g.points();
        const int so = config.stencil_order;
        const double gm1h = 0.5 * (params.gamma - 1.0);
        const double dm1h = 0.5 * (params.delta - 1.0);

        StateRate r = StateRate::zero(g);
        Field vadv = coeff.w + bg.u;

        Field tr_bg = Field::scalar(g);
        for (int i = 0; i < d; ++i) {
            const double* gii = bg.grad.comp(i * d + i);
            double* o = tr_bg.comp(0);
            for (long p = 0; p < npts; ++p) o[p] += gii[p];
        }
        Field div_wk = divergence(coeff.w, so);

        // varphi^{k+1}
        {
            Field av = advect(s.varphi, vadv, config.advection, so);
            double* o = r.varphi.comp(0);
            const double* a = av.comp(0);
            const double* ck = coeff.varphi.comp(0);
            const double* dw = div_wk.comp(0);
            const double* db = tr_bg.comp(0);
            for (long p = 0; p < npts; ++p) o[p] = -a[p] - dm1h * ck[p] * (dw[p] + db[p]);
        }

        // phi^{k+1}
        {
            Field ap = advect(s.phi, vadv, config.advection, so);
            Field div_wnew = divergence(s.w, so);
            double* o = r.phi.comp(0);
            const double* a = ap.comp(0);
            const double* pk = coeff.phi.comp(0);
            const double* dn = div_wnew.comp(0);
            const double* pn = s.phi.comp(0);
            const double* db = tr_bg.comp(0);
            for (long p = 0; p < npts; ++p)
                o[p] = -a[p] - gm1h * pk[p] * dn[p] - gm1h * pn[p] * db[p];
        }

        // w^{k+1}
        {
            Field varphi2 = Field::scalar(g);
            for (long p = 0; p < npts; ++p)
                varphi2.at(0, p) = s.varphi.at(0, p) * s.varphi.at(0, p);

            Field aw = advect(s.w, vadv, config.advection, so);
            Field gphi = gradient(s.phi, so);
            Field Lw = lame(s.w, params, so);
            const double eta2 = config.picard_eta * config.picard_eta;
            const double* pk = coeff.phi.comp(0);
            const double* v2 = varphi2.comp(0);
            for (int i = 0; i < d; ++i) {
                double* o = r.w.comp(i);
                const double* a = aw.comp(i);
                const double* gp = gphi.comp(i);
                const double* lw = Lw.comp(i);
                const double* lub = bg.lame_u.comp(i);
                for (long p = 0; p < npts; ++p) {
                    double wgu = 0;
                    for (int j = 0; j < d; ++j) wgu += s.w.at(j, p) * bg.grad.at(i * d + j, p);
                    o[p] = -a[p] - gm1h * pk[p] * gp[p] - (v2[p] + eta2) * lw[p] - wgu -
                           v2[p] * lub[p];
                }
            }
            if (params.model != ViscosityModel::laplacian_only) {
                Field gv2 = gradient(varphi2, so);
                Field Qk = stress_Q(coeff.w, params, so);
                const double qfac = params.delta / (params.delta - 1.0);
                const double* dub = tr_bg.comp(0);
                for (int j = 0; j < d; ++j) {
                    double* o = r.w.comp(j);
                    for (int i = 0; i < d; ++i) {
                        const double* gi = gv2.comp(i);
                        const double* qij = Qk.comp(i * d + j);
                        const double* gbij = bg.grad.comp(i * d + j);
                        const double* gbji = bg.grad.comp(j * d + i);
                        for (long p = 0; p < npts; ++p) {
                            double qb;
                            if (params.model == ViscosityModel::standard)
                                qb = params.alpha * (gbij[p] + gbji[p]);
                            else
                                qb = 2.0 * params.alpha * gbij[p];
                            if (i == j) qb += params.beta * dub[p];
                            o[p] += gi[p] * (qij[p] + qfac * qb);
                        }
                    }
                }
            }
        }
        return r;
    }
};

ReformState rk3_combine(const ReformState& base, double cb, const ReformState& stage, double cs,
                        const StateRate& rate, double cr, double t_new) {
    ReformState out = base;
    out.varphi *= cb;
    out.phi *= cb;
    out.w *= cb;
    axpy(cs, stage.varphi, out.varphi);
    axpy(cs, stage.phi, out.phi);
    axpy(cs, stage.w, out.w);
    axpy(cr, rate.varphi, out.varphi);
    axpy(cr, rate.phi, out.phi);
    axpy(cr, rate.w, out.w);
    out.t = t_new;
    return out;
}

} // namespace

PicardResult picard_solve(const ReformInit& init, const BurgersFlow& flow, const Params& params,
                          const SolverConfig& config, int k_max) {
    Solver util(init, flow, params, config);

    PicardResult res;
    const double T = config.end_time;
    double dt0 = 0.8 * util.stable_dt(ReformState::from_init(init));
    res.steps = std::max(1, static_cast<int>(std::ceil(T / dt0)));
    res.dt = T / res.steps;
    const int nsteps = res.steps;
    const double dt = res.dt;

    // Background at every half step, shared by all iterates.
    std::vector<Solver::BackgroundSample> bg;
    bg.reserve(static_cast<size_t>(2 * nsteps + 1));
    for (int j = 0; j <= 2 * nsteps; ++j) bg.push_back(util.sample_background(0.5 * j * dt));

    LinearRhs rhs{params, config};

    auto integrate_iterate = [&](const std::vector<ReformState>* prev,
                                 std::vector<ReformState>& out) {
        out.clear();
        out.reserve(static_cast<size_t>(nsteps + 1));
        out.push_back(ReformState::from_init(init));
        for (int n = 0; n < nsteps; ++n) {
            const double t0 = n * dt;
            const ReformState& s0 = out.back();
            const auto& bg0 = bg[static_cast<size_t>(2 * n)];
            const auto& bgh = bg[static_cast<size_t>(2 * n + 1)];
            const auto& bg1 = bg[static_cast<size_t>(2 * n + 2)];

            StateRate k1, k2, k3;
            ReformState u1, u2;
            if (!prev) {
                k1 = rhs.seed(s0, bg0);
                u1 = rk3_combine(s0, 1.0, s0, 0.0, k1, dt, t0 + dt);
                k2 = rhs.seed(u1, bg1);
                u2 = rk3_combine(s0, 0.75, u1, 0.25, k2, 0.25 * dt, t0 + 0.5 * dt);
                k3 = rhs.seed(u2, bgh);
            } else {
                const ReformState& c0 = (*prev)[static_cast<size_t>(n)];
                const ReformState& c1 = (*prev)[static_cast<size_t>(n + 1)];
                ReformState ch = lerp_state(c0, c1, 0.5);
                k1 = rhs(s0, c0, bg0);
                u1 = rk3_combine(s0, 1.0, s0, 0.0, k1, dt, t0 + dt);
                k2 = rhs(u1, c1, bg1);
                u2 = rk3_combine(s0, 0.75, u1, 0.25, k2, 0.25 * dt, t0 + 0.5 * dt);
                k3 = rhs(u2, ch, bgh);
            }
            ReformState un = rk3_combine(s0, 1.0 / 3.0, u2, 2.0 / 3.0, k3, 2.0 / 3.0 * dt, t0 + dt);
            if (!un.all_finite()) throw NonFinite("picard iterate");
            out.push_back(std::move(un));
        }
    };

    std::vector<ReformState> prev, cur;
    integrate_iterate(nullptr, prev);

    int grow_streak = 0;
    for (int k = 1; k <= k_max; ++k) {
        integrate_iterate(&prev, cur);
        double gamma = 0;
        for (size_t n = 0; n < cur.size(); ++n) {
            Field dphi = cur[n].phi - prev[n].phi;
            Field dw = cur[n].w - prev[n].w;
            Field dvp = cur[n].varphi - prev[n].varphi;
            double wdiff = inner(dphi, dphi) + inner(dw, dw);
            double vdiff = inner(dvp, dvp);
            gamma = std::max(gamma, wdiff + vdiff);
        }
        res.gamma.push_back(gamma);
        if (res.gamma.size() >= 2) {
            double ratio = gamma / res.gamma[res.gamma.size() - 2];
            res.ratios.push_back(ratio);
            grow_streak = (ratio > 1.0) ? grow_streak + 1 : 0;
            if (grow_streak >= 2)
                throw NoContraction("picard functional grew for two consecutive iterates");
        }
        std::swap(prev, cur);
        res.iterates = k;
    }
    res.final_state = prev.back();
    return res;
}

} // namespace nsvac
