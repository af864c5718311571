#include "nsvac/ode_bound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace nsvac {

namespace {

struct Quad {
    double value = 0;
    double error = 0;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
           double fb, double whole, double tol, int depth, Quad& out) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, m, fa, flm, fm);
    double right = simpson(m, b, fm, frm, fb);
    double err = (left + right - whole) / 15.0;
    // rounding floor: refinement below machine precision cannot help
    double floor_err = 1e-15 * (std::abs(left) + std::abs(right));
    if (std::abs(err) <= std::max(tol, floor_err) ||
        (b - a) < 1e-14 * (1.0 + std::abs(a))) {
        out.value += left + right + err;
        out.error += std::abs(err);
        return;
    }
    if (depth <= 0) {
        if (std::abs(err) <= 1e-7 * (1.0 + std::abs(whole))) {
            out.value += left + right + err;
            out.error += std::abs(err);
            return;
        }
        throw QuadratureFailure("adaptive Simpson recursion limit");
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

Quad adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    Quad out;
    if (a == b) return out;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = simpson(a, b, fa, fm, fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, 60, out);
    return out;
}

// exp-factor exponent: (C2/(D2+1)) ((1+t)^{D2+1} - 1), log form at D2 = -1.
double exp_arg(double C2, double D2, double t, bool* extrapolated) {
    if (D2 == -1.0) {
        if (extrapolated) *extrapolated = true;
        return C2 * std::log1p(t);
    }
    return C2 / (D2 + 1.0) * (std::pow(1.0 + t, D2 + 1.0) - 1.0);
}

} // namespace

OdeValue closed_form(const OdeSpec& spec, double t, double quad_tol) {
    if (!(spec.a > 1)) throw ConstraintViolated("closed_form needs a > 1");
    if (!(spec.Z0 > 0)) throw ConstraintViolated("closed_form needs Z0 > 0");
    OdeValue out;
    const double am1 = spec.a - 1.0;
    const double M = spec.D1 - am1 * spec.b;

    double integral = 0;
    if (spec.C1 > 0 && t > 0) {
        auto f = [&](double s) {
            return std::pow(1.0 + s, M) * std::exp(am1 * exp_arg(spec.C2, spec.D2, s, nullptr));
        };
        integral = adaptive_simpson(f, 0, t, quad_tol).value;
    }
    double den = std::pow(spec.Z0, -am1) - am1 * spec.C1 * integral;
    if (den <= 0) {
        OdeValue b = blowup_time(spec, std::max(2.0 * t, 2.0), quad_tol);
        b.blowup = true;
        return b;
    }
    out.value = std::pow(1.0 + t, -spec.b) *
                std::exp(exp_arg(spec.C2, spec.D2, t, &out.extrapolated)) /
                std::pow(den, 1.0 / am1);
    return out;
}

OdeValue blowup_time(const OdeSpec& spec, double t_max, double quad_tol) {
    OdeValue out;
    const double am1 = spec.a - 1.0;
    const double M = spec.D1 - am1 * spec.b;
    const double target = std::pow(spec.Z0, -am1) / (am1 * spec.C1);
    if (!(spec.C1 > 0)) return out;

    auto f = [&](double s) {
        return std::pow(1.0 + s, M) * std::exp(am1 * exp_arg(spec.C2, spec.D2, s, nullptr));
    };
    auto I = [&](double t) { return adaptive_simpson(f, 0, t, quad_tol).value; };

    // The integral is strictly increasing; bracket the crossing by doubling.
    double hi = 1.0;
    while (hi < t_max && I(hi) < target) hi *= 2;
    if (I(hi) < target) return out;  // global up to t_max
    double lo = 0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (I(mid) < target ? lo : hi) = mid;
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    out.blowup = true;
    out.t_blow = 0.5 * (lo + hi);
    out.value = std::numeric_limits<double>::infinity();
    return out;
}

Threshold threshold_lambda(const OdeSpec& spec, double quad_tol) {
    Threshold out;
    if (spec.C1 == 0) {
        out.infinite = true;
        out.lambda = std::numeric_limits<double>::infinity();
        return out;
    }
    const double am1 = spec.a - 1.0;
    const double M = spec.D1 - am1 * spec.b;
    std::string bad;
    if (!(spec.a > 1)) bad += " {a > 1}";
    if (!(M < -1)) bad += " {D1 - (a-1)b < -1}";
    if (!(spec.D2 < -1)) bad += " {D2 < -1}";
    if (!bad.empty()) throw HypothesesViolated(bad);

    // Split at S where the exp factor has saturated, bound the tail by the
    // closed-form power integral bracketed between the two exp values.
    auto E = [&](double s) { return std::exp(am1 * exp_arg(spec.C2, spec.D2, s, nullptr)); };
    double S = 1.0;
    const double Einf = std::exp(am1 * spec.C2 / (spec.D2 + 1.0) * (-1.0));
    while (S < 1e9 && std::abs(E(S) - Einf) > 1e-13 * std::abs(Einf) + 1e-300) S *= 2;

    auto f = [&](double s) { return std::pow(1.0 + s, M) * E(s); };
    Quad head = adaptive_simpson(f, 0, S, quad_tol);
    const double tail_power = std::pow(1.0 + S, M + 1.0) / (-M - 1.0);
    const double lo = tail_power * std::min(E(S), Einf);
    const double hi = tail_power * std::max(E(S), Einf);
    out.J_inf = head.value + 0.5 * (lo + hi);
    out.error_estimate = head.error + 0.5 * (hi - lo);
    out.lambda = std::pow(am1 * spec.C1 * out.J_inf, -1.0 / am1);
    return out;
}

OdeTrajectory integrate(const OdeSpec& spec, double t_end, double rtol,
                        const std::vector<double>* sample_times) {
    OdeTrajectory tr;
    auto rhs = [&](double t, double z) {
        return -spec.b / (1.0 + t) * z + spec.C1 * std::pow(1.0 + t, spec.D1) * std::pow(z, spec.a) +
               spec.C2 * std::pow(1.0 + t, spec.D2) * z;
    };
    // Dormand-Prince 5(4) pair.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double z_cap = 1e6 * std::max(1.0, spec.Z0) / rtol;
    const double atol = rtol * std::max(1.0, spec.Z0) * 1e-3;
    double t = 0, z = spec.Z0, h = 1e-4;
    size_t next_sample = 0;
    auto record = [&](double tt, double zz) {
        tr.t.push_back(tt);
        tr.z.push_back(zz);
    };
    auto emit_samples_through = [&](double t0, double z0b, double t1, double z1) {
        if (!sample_times) return;
        while (next_sample < sample_times->size() && (*sample_times)[next_sample] <= t1) {
            double ts = (*sample_times)[next_sample];
            double w = (t1 > t0) ? (ts - t0) / (t1 - t0) : 0.0;
            record(ts, z0b + w * (z1 - z0b));  // linear; steps are error-controlled
            ++next_sample;
        }
    };
    if (!sample_times) record(t, z);

    while (t < t_end) {
        h = std::min(h, t_end - t);
        if (h < 1e-14 * (1.0 + t)) {
            tr.blowup = true;
            tr.t_blow = t;
            tr.halt = "step_underflow";
            return tr;
        }
        double k1 = rhs(t, z);
        double k2 = rhs(t + c2 * h, z + h * a21 * k1);
        double k3 = rhs(t + c3 * h, z + h * (a31 * k1 + a32 * k2));
        double k4 = rhs(t + c4 * h, z + h * (a41 * k1 + a42 * k2 + a43 * k3));
        double k5 = rhs(t + c5 * h, z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        double k6 = rhs(t + h, z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        double znew = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        double k7 = rhs(t + h, znew);
        double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double sc = atol + rtol * std::max(std::abs(z), std::abs(znew));
        double ratio = std::abs(err) / sc;
        if (ratio <= 1.0 || !std::isfinite(znew)) {
            if (!std::isfinite(znew) || znew > z_cap) {
                tr.blowup = true;
                tr.t_blow = t + h;
                tr.halt = "blowup";
                return tr;
            }
            emit_samples_through(t, z, t + h, znew);
            t += h;
            z = znew;
            if (!sample_times) record(t, z);
        }
        double fac = 0.9 * std::pow(std::max(ratio, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
    }
    return tr;
}

EnvelopeResult envelope_check(const std::vector<double>& t, const std::vector<double>& value,
                              OdeSpec spec, double slack) {
    if (t.size() != value.size() || t.size() < 20)
        throw FitDegenerate("envelope_check needs at least 20 samples");
    EnvelopeResult out;
    out.slack_used = slack;
    const size_t n = t.size();
    const size_t nfit = std::max<size_t>(4, n / 10);

    // Regress dZ/dt + b/(1+t) Z on the two basis terms over the fit window.
    double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
    for (size_t i = 1; i + 1 < nfit; ++i) {
        double dz = (value[i + 1] - value[i - 1]) / (t[i + 1] - t[i - 1]);
        double lhs = dz + spec.b / (1.0 + t[i]) * value[i];
        double f1 = std::pow(1.0 + t[i], spec.D1) * std::pow(value[i], spec.a);
        double f2 = std::pow(1.0 + t[i], spec.D2) * value[i];
        a11 += f1 * f1;
        a12 += f1 * f2;
        a22 += f2 * f2;
        r1 += f1 * lhs;
        r2 += f2 * lhs;
    }
    double det2 = a11 * a22 - a12 * a12;
    double c1 = 0, c2 = 0;
    if (std::abs(det2) > 1e-300) {
        c1 = (r1 * a22 - r2 * a12) / det2;
        c2 = (a11 * r2 - a12 * r1) / det2;
    }
    if (c1 < 0) {  // nonnegative prefactors: refit the other alone
        c1 = 0;
        c2 = (a22 > 0) ? std::max(0.0, r2 / a22) : 0.0;
    } else if (c2 < 0) {
        c2 = 0;
        c1 = (a11 > 0) ? std::max(0.0, r1 / a11) : 0.0;
    }
    out.fitted_C1 = c1;
    out.fitted_C2 = c2;

    OdeSpec fitted = spec;
    fitted.C1 = c1;
    fitted.C2 = c2;
    fitted.Z0 = value[0];
    if (!(fitted.Z0 > 0)) {
        out.verdict = EnvelopeVerdict::not_applicable;
        return out;
    }

    // Shift time origin of the comparison ODE to the series start.
    std::vector<double> rel(n);
    for (size_t i = 0; i < n; ++i) rel[i] = t[i] - t[0];
    OdeTrajectory sol = integrate(fitted, rel.back(), 1e-10, &rel);
    if (sol.blowup) {
        out.verdict = EnvelopeVerdict::violated_at;
        out.t_violate = t[0] + sol.t_blow;
        return out;
    }
    for (size_t i = 0; i < sol.t.size(); ++i) {
        size_t idx = i;
        if (idx < nfit) continue;  // fit window is not evidence
        if (value[idx] > sol.z[i] * (1.0 + slack) + 1e-300) {
            out.verdict = EnvelopeVerdict::violated_at;
            out.t_violate = t[idx];
            return out;
        }
    }
    out.verdict = EnvelopeVerdict::bounded_by;
    return out;
}

} // namespace nsvac
