#include "nsvac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsvac/norms.hpp"
#include "nsvac/operators.hpp"

namespace nsvac {

ReformState ReformState::zero(const Grid& g) {
    return ReformState{0.0, Field::scalar(g), Field::scalar(g), Field::vector(g)};
}

ReformState ReformState::from_init(const ReformInit& init) {
    return ReformState{0.0, init.varphi0, init.phi0, init.w0};
}

bool ReformState::all_finite() const {
    return varphi.all_finite() && phi.all_finite() && w.all_finite();
}

StateRate StateRate::zero(const Grid& g) {
    return StateRate{Field::scalar(g), Field::scalar(g), Field::vector(g)};
}

void StateRate::add(const StateRate& o, double s) {
    axpy(s, o.varphi, varphi);
    axpy(s, o.phi, phi);
    axpy(s, o.w, w);
}

StateRate RhsDecomposition::total() const {
    StateRate t = transport_phi;
    t.add(hyperbolic_W);
    t.add(elliptic_W);
    t.add(source_HQ);
    t.add(source_G);
    return t;
}

std::string HaltReason::text() const {
    static const char* names[] = {"completed",         "gradient_threshold", "zero_dt",
                                  "negativity_breach", "non_finite",         "support_wraparound"};
    std::ostringstream os;
    os << "halt " << names[code] << " t " << t;
    if (!detail.empty()) os << " detail " << detail;
    return os.str();
}

double phi_to_rho_prefactor(const Params& p) {
    return std::pow((p.gamma - 1.0) * (p.gamma - 1.0) / (4.0 * p.A * p.gamma),
                    1.0 / (p.gamma - 1.0));
}

Solver::Solver(const ReformInit& init, const BurgersFlow& flow, const Params& params,
               const SolverConfig& config)
    : grid_(init.varphi0.grid()),
      params_(params),
      config_(config),
      flow_(flow),
      state_(ReformState::from_init(init)) {
    require_valid(params_);
    if (flow_.dim() != grid_.dim) throw ConfigError("flow/grid dimension mismatch");
    if (!flow_.has_hess())
        throw ConfigError("solver needs a background flow with Hessian evaluators");
    if (config_.cfl <= 0 || config_.cfl > 1) throw ConfigError("cfl must lie in (0, 1]");
    mass_scale_ = integral(state_.phi) + integral(state_.varphi);
    envelope_ = (config_.initial_support_radius > 0) ? config_.initial_support_radius
                                                     : support_radius(state_);
}

Solver::BackgroundSample Solver::sample_background(double t) const {
    BackgroundSample bg{Field::vector(grid_), Field::matrix(grid_), Field::vector(grid_), 0.0};
    const int d = grid_.dim;
    double c_lap = 0, c_gd = 0;
    switch (params_.model) {
        case ViscosityModel::standard:
            c_lap = params_.alpha;
            c_gd = params_.alpha + params_.beta;
            break;
        case ViscosityModel::gradient_form:
            c_lap = 2.0 * params_.alpha;
            c_gd = params_.beta;
            break;
        case ViscosityModel::laplacian_only:
            c_lap = params_.alpha;
            c_gd = 0.0;
            break;
    }
    for (long p = 0; p < grid_.points(); ++p) {
        auto e = flow_.eval(t, grid_.point(p));
        double fro = 0;
        for (int i = 0; i < d; ++i) {
            bg.u.at(i, p) = e.u[i];
            for (int j = 0; j < d; ++j) {
                bg.grad.at(i * d + j, p) = e.grad(i, j);
                fro += e.grad(i, j) * e.grad(i, j);
            }
        }
        bg.grad_linf = std::max(bg.grad_linf, std::sqrt(fro));
        auto H = flow_.hess_along(t, e.x0);
        for (int i = 0; i < d; ++i) {
            double lap = 0, gdiv = 0;
            for (int j = 0; j < d; ++j) {
                lap += H[static_cast<size_t>(i)](j, j);
                gdiv += H[static_cast<size_t>(j)](j, i);
            }
            bg.lame_u.at(i, p) = -c_lap * lap - c_gd * gdiv;
        }
    }
    return bg;
}

// sum_a vel_a d_a f, central or first-order upwind per the advecting speed.
Field advect(const Field& f, const Field& vel, AdvectionScheme scheme, int so) {
    const Grid& g = f.grid();
    const int d = g.dim;
    Field out(g, f.order());
    if (scheme == AdvectionScheme::central_filtered) {
        for (int a = 0; a < d; ++a) {
            Field da = derivative(f, a, so);
            const double* v = vel.comp(a);
            for (int c = 0; c < f.ncomp(); ++c) {
                double* o = out.comp(c);
                const double* dv = da.comp(c);
                for (long p = 0; p < g.points(); ++p) o[p] += v[p] * dv[p];
            }
        }
        return out;
    }
    const int n = g.n;
    const double h = g.spacing();
    for (int a = 0; a < d; ++a) {
        const long s = g.stride(a);
        const double* v = vel.comp(a);
        for (int c = 0; c < f.ncomp(); ++c) {
            double* o = out.comp(c);
            const double* fv = f.comp(c);
            for (long p = 0; p < g.points(); ++p) {
                const int i = static_cast<int>((p / s) % n);
                const long pp = p + ((i + 1) % n - i) * s;
                const long pm = p + ((i + n - 1) % n - i) * s;
                const double dfm = (fv[p] - fv[pm]) / h;
                const double dfp = (fv[pp] - fv[p]) / h;
                o[p] += v[p] * (v[p] >= 0 ? dfm : dfp);
            }
        }
    }
    return out;
}

namespace {

void check_finite(const Field& f, const char* term) {
    if (!f.all_finite()) throw NonFinite(term);
}

} // namespace

RhsDecomposition Solver::rhs(const ReformState& s) const {
    const int d = grid_.dim;
    const long npts = grid_.points();
    const int so = config_.stencil_order;
    const double gm1h = 0.5 * (params_.gamma - 1.0);
    const double dm1h = 0.5 * (params_.delta - 1.0);

    BackgroundSample bg = sample_background(s.t);
    Field utot = s.w + bg.u;

    // Discrete derivatives touch only the compactly supported fields; every
    // background derivative is evaluated analytically, so the periodic seam
    // never sees the affine growth of ubar.
    Field div_w = divergence(s.w, so);
    Field div_ubar = Field::scalar(grid_);
    for (int i = 0; i < d; ++i) {
        const double* gii = bg.grad.comp(i * d + i);
        double* o = div_ubar.comp(0);
        for (long p = 0; p < npts; ++p) o[p] += gii[p];
    }

    Field varphi2 = Field::scalar(grid_);
    for (long p = 0; p < npts; ++p) varphi2.at(0, p) = s.varphi.at(0, p) * s.varphi.at(0, p);

    RhsDecomposition out{StateRate::zero(grid_), StateRate::zero(grid_), StateRate::zero(grid_),
                         StateRate::zero(grid_), StateRate::zero(grid_)};

    // --- varphi transport ---------------------------------------------
    {
        Field adv = advect(s.varphi, utot, config_.advection, so);
        Field div_tot = div_w + div_ubar;
        double* o = out.transport_phi.varphi.comp(0);
        const double* av = adv.comp(0);
        const double* vp = s.varphi.comp(0);
        const double* dt2 = div_tot.comp(0);
        for (long p = 0; p < npts; ++p) o[p] = -av[p] - dm1h * vp[p] * dt2[p];
        check_finite(out.transport_phi.varphi, "transport_phi");
    }

    // --- hyperbolic part of W (self advection + acoustic coupling) -----
    {
        Field adv_phi = advect(s.phi, s.w, config_.advection, so);
        double* o = out.hyperbolic_W.phi.comp(0);
        const double* ap = adv_phi.comp(0);
        const double* ph = s.phi.comp(0);
        const double* dw = div_w.comp(0);
        for (long p = 0; p < npts; ++p) o[p] = -ap[p] - gm1h * ph[p] * dw[p];

        Field adv_w = advect(s.w, s.w, config_.advection, so);
        Field grad_phi = gradient(s.phi, so);
        for (int i = 0; i < d; ++i) {
            double* ow = out.hyperbolic_W.w.comp(i);
            const double* aw = adv_w.comp(i);
            const double* gp = grad_phi.comp(i);
            for (long p = 0; p < npts; ++p) ow[p] = -aw[p] - gm1h * ph[p] * gp[p];
        }
        check_finite(out.hyperbolic_W.w, "hyperbolic_W");
    }

    // --- degenerate elliptic part ---------------------------------------
    {
        Field Lw = lame(s.w, params_, so);
        const double* v2 = varphi2.comp(0);
        for (int i = 0; i < d; ++i) {
            double* o = out.elliptic_W.w.comp(i);
            const double* lw = Lw.comp(i);
            for (long p = 0; p < npts; ++p) o[p] = -v2[p] * lw[p];
        }
        check_finite(out.elliptic_W.w, "elliptic_W");
    }

    // --- first-order source grad(varphi^2) . Q(w + ubar) ----------------
    if (params_.model != ViscosityModel::laplacian_only) {
        Field gv2 = gradient(varphi2, so);
        Field Qw = stress_Q(s.w, params_, so);
        const double qfac = params_.delta / (params_.delta - 1.0);
        for (int j = 0; j < d; ++j) {
            double* o = out.source_HQ.w.comp(j);
            for (int i = 0; i < d; ++i) {
                const double* gi = gv2.comp(i);
                const double* qij = Qw.comp(i * d + j);
                const double* gbij = bg.grad.comp(i * d + j);
                const double* gbji = bg.grad.comp(j * d + i);
                const double* dub = div_ubar.comp(0);
                for (long p = 0; p < npts; ++p) {
                    // Q entries of the background, straight from the analytic
                    // gradient samples.
                    double qb;
                    if (params_.model == ViscosityModel::standard)
                        qb = params_.alpha * (gbij[p] + gbji[p]);
                    else
                        qb = 2.0 * params_.alpha * gbij[p];
                    if (i == j) qb += params_.beta * dub[p];
                    o[p] += gi[p] * (qij[p] + qfac * qb);
                }
            }
        }
        check_finite(out.source_HQ.w, "source_HQ");
    }

    // --- background coupling G -------------------------------------------
    {
        Field adv_phi = advect(s.phi, bg.u, config_.advection, so);
        double* o = out.source_G.phi.comp(0);
        const double* ap = adv_phi.comp(0);
        const double* ph = s.phi.comp(0);
        const double* dub = div_ubar.comp(0);
        for (long p = 0; p < npts; ++p) o[p] = -ap[p] - gm1h * ph[p] * dub[p];

        Field adv_w = advect(s.w, bg.u, config_.advection, so);
        const double* v2 = varphi2.comp(0);
        for (int i = 0; i < d; ++i) {
            double* ow = out.source_G.w.comp(i);
            const double* aw = adv_w.comp(i);
            const double* lub = bg.lame_u.comp(i);
            for (long p = 0; p < npts; ++p) {
                double wgu = 0;  // (w . grad) ubar
                for (int j = 0; j < d; ++j) wgu += s.w.at(j, p) * bg.grad.at(i * d + j, p);
                ow[p] = -aw[p] - wgu - v2[p] * lub[p];
            }
        }
        check_finite(out.source_G.w, "source_G");
        check_finite(out.source_G.phi, "source_G_phi");
    }

    return out;
}

double Solver::stable_dt(const ReformState& s) const {
    BackgroundSample bg = sample_background(s.t);
    const long npts = grid_.points();
    const int d = grid_.dim;
    const double h = grid_.spacing();
    const double gm1h = 0.5 * (params_.gamma - 1.0);

    double speed = 0, maxphi2 = 0;
    for (long p = 0; p < npts; ++p) {
        double v2 = 0;
        for (int c = 0; c < d; ++c) {
            double u = s.w.at(c, p) + bg.u.at(c, p);
            v2 += u * u;
        }
        speed = std::max(speed, std::sqrt(v2) + gm1h * std::abs(s.phi.at(0, p)));
        double vp = s.varphi.at(0, p);
        maxphi2 = std::max(maxphi2, vp * vp);
    }

    double dt_adv = (speed > 0) ? h / speed : std::numeric_limits<double>::infinity();
    double visc_coef = 2.0 * d * maxphi2 * lame_coefficient_sum(params_);
    double dt_visc = (visc_coef > 0) ? config_.dt_viscous_safety * h * h / visc_coef
                                     : std::numeric_limits<double>::infinity();
    double dt = config_.cfl * std::min(dt_adv, dt_visc);
    dt = std::min(dt, config_.output_stride);
    if (!(dt > 1e-12 * config_.output_stride))
        throw ZeroDt("time step collapsed (viscous bound underflow)");
    return dt;
}

void Solver::apply_filter(ReformState& s) const {
    const double eps = config_.filter_eps;
    if (eps <= 0) return;
    const Grid& g = grid_;
    const int n = g.n;
    auto filter_field = [&](Field& f) {
        for (int a = 0; a < g.dim; ++a) {
            const long st = g.stride(a);
            Field src = f;
            for (int c = 0; c < f.ncomp(); ++c) {
                double* o = f.comp(c);
                const double* v = src.comp(c);
                for (long p = 0; p < g.points(); ++p) {
                    const int i = static_cast<int>((p / st) % n);
                    const long pp1 = p + ((i + 1) % n - i) * st;
                    const long pm1 = p + ((i + n - 1) % n - i) * st;
                    const long pp2 = p + ((i + 2) % n - i) * st;
                    const long pm2 = p + ((i + n - 2) % n - i) * st;
                    o[p] = v[p] - eps / 16.0 *
                                      (v[pm2] - 4 * v[pm1] + 6 * v[p] - 4 * v[pp1] + v[pp2]);
                }
            }
        }
    };
    filter_field(s.varphi);
    filter_field(s.phi);
    filter_field(s.w);
}

double Solver::clamp_negative(ReformState& s) {
    double clamped = 0;
    auto clamp_field = [&](Field& f) {
        double* v = f.comp(0);
        for (long p = 0; p < f.npts(); ++p)
            if (v[p] < 0) {
                clamped -= v[p];
                v[p] = 0;
            }
    };
    clamp_field(s.varphi);
    clamp_field(s.phi);
    return clamped * std::pow(grid_.spacing(), grid_.dim);
}

void Solver::advance_envelope(double dt, const BackgroundSample& bg, const ReformState& s) {
    if (envelope_ <= 0) return;
    // The support is transported by u = w + ubar, so its radius grows at most
    // at the top speed over the support ball. Taking the speed over the ball
    // (not the whole box) keeps a distant steepening region from inflating
    // the bound; for affine backgrounds this integrates to exactly R (1 + t).
    const int d = grid_.dim;
    auto ball_speed = [&](double ball) {
        double v = 0;
        for (long p = 0; p < grid_.points(); ++p) {
            if (grid_.point(p).norm() > ball) continue;
            double s2 = 0;
            for (int c = 0; c < d; ++c) {
                double uc = bg.u.at(c, p) + s.w.at(c, p);
                s2 += uc * uc;
            }
            v = std::max(v, s2);
        }
        return std::sqrt(v);
    };
    double speed = ball_speed(envelope_ + 4.0 * grid_.spacing());
    speed = ball_speed(envelope_ + 4.0 * grid_.spacing() + dt * speed);
    envelope_ += dt * speed;
}

void Solver::step(double dt) {
    const double t0 = state_.t;
    BackgroundSample bg0 = sample_background(t0);

    auto apply = [&](const ReformState& base, double c_base, const ReformState& stage,
                     double c_stage, const StateRate& rate, double c_rate, double t_new) {
        ReformState out = base;
        out.varphi *= c_base;
        out.phi *= c_base;
        out.w *= c_base;
        axpy(c_stage, stage.varphi, out.varphi);
        axpy(c_stage, stage.phi, out.phi);
        axpy(c_stage, stage.w, out.w);
        axpy(c_rate, rate.varphi, out.varphi);
        axpy(c_rate, rate.phi, out.phi);
        axpy(c_rate, rate.w, out.w);
        out.t = t_new;
        return out;
    };

    StateRate k1 = rhs(state_).total();
    ReformState u1 = apply(state_, 1.0, state_, 0.0, k1, dt, t0 + dt);

    StateRate k2 = rhs(u1).total();
    ReformState u2 = apply(state_, 0.75, u1, 0.25, k2, 0.25 * dt, t0 + 0.5 * dt);

    StateRate k3 = rhs(u2).total();
    ReformState un = apply(state_, 1.0 / 3.0, u2, 2.0 / 3.0, k3, 2.0 / 3.0 * dt, t0 + dt);

    if (config_.advection == AdvectionScheme::central_filtered) apply_filter(un);
    clamp_last_ = clamp_negative(un);
    clamp_total_ += clamp_last_;
    if (!un.all_finite()) {
        // attribute the failure to the first non-finite rhs term
        rhs(state_);  // throws NonFinite from the term checks if reproducible
        throw NonFinite("state");
    }
    if (clamp_last_ > 1e-8 * std::max(mass_scale_, 1e-300))
        throw NegativityBreach("clamped mass " + std::to_string(clamp_last_) +
                               " exceeds 1e-8 of reference mass in one step");

    advance_envelope(dt, bg0, state_);
    state_ = std::move(un);
}

double Solver::support_radius(const ReformState& s) const {
    const double thr = 1e-12;
    double r = 0;
    for (long p = 0; p < grid_.points(); ++p) {
        bool live = std::abs(s.varphi.at(0, p)) > thr || std::abs(s.phi.at(0, p)) > thr;
        for (int c = 0; !live && c < grid_.dim; ++c) live = std::abs(s.w.at(c, p)) > thr;
        if (live) r = std::max(r, grid_.point(p).norm());
    }
    return r;
}

Trajectory Solver::run(const std::vector<Observer>& observers, bool keep_snapshots) {
    Trajectory traj;
    auto emit = [&](double dt_last) {
        Snapshot snap{state_, dt_last, clamp_last_, clamp_total_, support_radius(state_),
                      envelope_};
        traj.times.push_back(state_.t);
        for (const auto& ob : observers) ob(*this, snap);
        if (keep_snapshots) traj.snapshots.push_back(std::move(snap));
    };

    emit(0.0);
    double dt_last = 0;
    while (state_.t < config_.end_time - 1e-12) {
        double t_next = std::min(state_.t + config_.output_stride, config_.end_time);
        try {
            while (state_.t < t_next - 1e-12) {
                double dt = std::min(stable_dt(state_), t_next - state_.t);
                step(dt);
                dt_last = dt;
                traj.dt_log.emplace_back(state_.t, dt);
            }
        } catch (const ZeroDt& e) {
            traj.halt = {HaltReason::zero_dt, state_.t, e.what()};
            return traj;
        } catch (const NonFinite& e) {
            traj.halt = {HaltReason::non_finite, state_.t, e.term};
            return traj;
        } catch (const SingularJacobian& e) {
            traj.halt = {HaltReason::gradient_threshold, state_.t,
                         std::string("background characteristic crossing: ") + e.what()};
            return traj;
        } catch (const NewtonDiverged& e) {
            traj.halt = {HaltReason::gradient_threshold, state_.t,
                         std::string("background inversion failed: ") + e.what()};
            return traj;
        } catch (const NegativityBreach& e) {
            traj.halt = {HaltReason::negativity_breach, state_.t, e.what()};
            return traj;
        }
        emit(dt_last);

        // blow-up monitor: max entry of grad u = grad w + grad ubar
        BackgroundSample bg = sample_background(state_.t);
        Field gw = gradient(state_.w, config_.stencil_order);
        double gmax = 0;
        for (int c = 0; c < gw.ncomp(); ++c) {
            const double* a = gw.comp(c);
            const double* b = bg.grad.comp(c);
            for (long p = 0; p < grid_.points(); ++p)
                gmax = std::max(gmax, std::abs(a[p] + b[p]));
        }
        if (gmax > config_.grad_threshold) {
            traj.halt = {HaltReason::gradient_threshold, state_.t,
                         "max|grad u| = " + std::to_string(gmax)};
            return traj;
        }

        // support tracker: halt before any wrap-around can occur
        double radius = std::max(support_radius(state_), envelope_);
        double umax = state_.w.max_pointwise_norm() + bg.u.max_pointwise_norm();
        double margin = 2.0 * umax * config_.output_stride + 6.0 * grid_.spacing();
        if (radius + margin >= grid_.extent) {
            traj.halt = {HaltReason::support_wraparound, state_.t,
                         "support radius " + std::to_string(radius) + " near box edge"};
            return traj;
        }
    }
    traj.halt = {HaltReason::completed, state_.t, ""};
    return traj;
}

Solver::Physical Solver::to_physical(const ReformState& s) const {
    Physical out{Field::scalar(grid_), Field::vector(grid_), Field::scalar(grid_), 0.0};
    const double pref = phi_to_rho_prefactor(params_);
    const double pw = 2.0 / (params_.gamma - 1.0);
    const double pwd = 2.0 / (params_.delta - 1.0);
    for (long p = 0; p < grid_.points(); ++p) {
        double ph = s.phi.at(0, p);
        double vp = s.varphi.at(0, p);
        if (ph < -1e-12 || vp < -1e-12) throw NegativePhi("negative phi in to_physical");
        ph = std::max(ph, 0.0);
        vp = std::max(vp, 0.0);
        out.rho.at(0, p) = (ph > 0) ? pref * std::exp(pw * std::log(ph)) : 0.0;
        out.rho_dual.at(0, p) = (vp > 0) ? std::exp(pwd * std::log(vp)) : 0.0;
    }
    BackgroundSample bg = sample_background(s.t);
    for (int c = 0; c < grid_.dim; ++c) {
        double* u = out.u.comp(c);
        const double* wv = s.w.comp(c);
        const double* ub = bg.u.comp(c);
        for (long p = 0; p < grid_.points(); ++p) u[p] = wv[p] + ub[p];
    }
    double gap = 0;
    for (long p = 0; p < grid_.points(); ++p) {
        double r = out.rho.at(0, p);
        if (r > config_.vacuum_floor)
            gap = std::max(gap, std::abs(r - out.rho_dual.at(0, p)) / r);
    }
    out.dual_gap = gap;
    return out;
}

} // namespace nsvac
