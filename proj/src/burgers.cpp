#include "nsvac/burgers.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nsvac/norms.hpp"
#include "nsvac/operators.hpp"

namespace nsvac {

InitialVelocity InitialVelocity::affine(int dim, const Mat& A) {
    InitialVelocity iv;
    iv.dim = dim;
    iv.has_affine = true;
    iv.A = A;
    iv.u0 = [A](const Vec& x) { return A * x; };
    iv.grad_u0 = [A](const Vec&) { return A; };
    iv.hess_u0 = [dim](const Vec&) { return std::array<Mat, 3>{Mat(dim), Mat(dim), Mat(dim)}; };
    return iv;
}

double InitialVelocity::grad_consistency_error(const std::vector<Vec>& samples, double h) const {
    double worst = 0;
    for (const Vec& x : samples) {
        Mat g = grad_u0(x);
        for (int j = 0; j < dim; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            Vec d = u0(xp) - u0(xm);
            for (int i = 0; i < dim; ++i)
                worst = std::max(worst, std::abs(d[i] / (2 * h) - g(i, j)));
        }
    }
    return worst;
}

BurgersFlow::BurgersFlow(InitialVelocity init) : init_(std::move(init)) {
    if (!init_.u0 || !init_.grad_u0) throw ConfigError("BurgersFlow needs u0 and grad_u0");
}

Vec BurgersFlow::forward(double t, const Vec& x0) const { return x0 + t * init_.u0(x0); }

Mat BurgersFlow::grad_along(double t, const Vec& x0) const {
    Mat G0 = init_.grad_u0(x0);
    Mat M = Mat::identity(init_.dim);
    M += t * G0;
    double dt = det(M);
    if (std::abs(dt) < 1e-12) throw SingularJacobian(std::abs(dt));
    return inverse(M, dt) * G0;
}

Mat BurgersFlow::k_matrix(double t, const Vec& x0) const {
    Mat g = grad_along(t, x0);
    Mat K = (1.0 + t) * (1.0 + t) * g;
    K -= (1.0 + t) * Mat::identity(init_.dim);
    return K;
}

std::array<Mat, 3> BurgersFlow::hess_along(double t, const Vec& x0) const {
    if (!init_.hess_u0) throw ConfigError("initial velocity carries no Hessian evaluator");
    const int d = init_.dim;
    Mat G0 = init_.grad_u0(x0);
    Mat J = Mat::identity(d);
    J += t * G0;
    double dj = det(J);
    if (std::abs(dj) < 1e-12) throw SingularJacobian(std::abs(dj));
    Mat Jinv = inverse(J, dj);
    Mat gu = Jinv * G0;  // grad u at the characteristic
    auto H0 = init_.hess_u0(x0);

    std::array<Mat, 3> out{Mat(d), Mat(d), Mat(d)};
    for (int i = 0; i < d; ++i) {
        // B_i = hess u0_i - t * sum_j (grad u)_ij hess u0_j
        Mat B = H0[static_cast<size_t>(i)];
        for (int j = 0; j < d; ++j) B -= t * gu(i, j) * H0[static_cast<size_t>(j)];
        // H_i = Jinv^T B Jinv
        Mat H(d);
        for (int k = 0; k < d; ++k)
            for (int m2 = 0; m2 < d; ++m2) {
                double s = 0;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) s += Jinv(a, k) * B(a, b) * Jinv(b, m2);
                H(k, m2) = s;
            }
        out[static_cast<size_t>(i)] = H;
    }
    return out;
}

namespace {

double map_residual(const BurgersFlow& flow, double t, const Vec& x, const Vec& x0, Vec* F) {
    Vec r = flow.forward(t, x0) - x;
    if (F) *F = r;
    return r.norm();
}

// Monotone bracket-and-bisect fallback for 1-D inversions.
Vec bisect_1d(const BurgersFlow& flow, double t, const Vec& x, double tol) {
    auto g = [&](double s) {
        Vec v(1);
        v[0] = s;
        return flow.forward(t, v)[0] - x[0];
    };
    double a = x[0] / (1.0 + t), b = a;
    double step = std::max(1.0, std::abs(x[0]));
    int guard = 0;
    while (g(a) > 0 && guard++ < 200) a -= step, step *= 2;
    step = std::max(1.0, std::abs(x[0]));
    guard = 0;
    while (g(b) < 0 && guard++ < 200) b += step, step *= 2;
    if (g(a) > 0 || g(b) < 0) throw NewtonDiverged(std::abs(g(a)), 0);
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        double gm = g(m);
        if (std::abs(gm) <= tol) {
            Vec v(1);
            v[0] = m;
            return v;
        }
        (gm > 0 ? b : a) = m;
    }
    Vec v(1);
    v[0] = 0.5 * (a + b);
    return v;
}

} // namespace

BurgersFlow::Eval BurgersFlow::eval(double t, const Vec& x) const {
    const int d = init_.dim;
    const double tol = std::max(1e-12, 8 * std::numeric_limits<double>::epsilon() *
                                           (x.maxabs() + 1.0) * (1.0 + t));

    double last_r = 0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        Vec x0 = (attempt == 0) ? (1.0 / (1.0 + t)) * x : x;
        int it = 0;
        for (; it < 100; ++it) {
            Vec F(d);
            double r = map_residual(*this, t, x, x0, &F);
            last_r = r;
            if (r <= tol) {
                Eval e;
                e.u = init_.u0(x0);
                e.grad = grad_along(t, x0);
                e.x0 = x0;
                e.iters = it;
                return e;
            }
            Mat J = Mat::identity(d);
            J += t * init_.grad_u0(x0);
            double dj = det(J);
            if (std::abs(dj) < 1e-12) break;  // crossing; try fallback path
            Vec step = inverse(J, dj) * F;
            step *= -1.0;
            double lam = 1.0;
            Vec xn = x0 + step;
            double rn = map_residual(*this, t, x, xn, nullptr);
            while (rn > (1.0 - 0.25 * lam) * r && lam > 1e-6) {
                lam *= 0.5;
                xn = x0 + lam * step;
                rn = map_residual(*this, t, x, xn, nullptr);
            }
            if (rn >= r && lam <= 1e-6) break;  // stalled
            x0 = xn;
        }
        if (attempt == 1 && d == 1) {
            Vec x0b = bisect_1d(*this, t, x, tol);
            Eval e;
            e.u = init_.u0(x0b);
            e.grad = grad_along(t, x0b);
            e.x0 = x0b;
            e.iters = 100;
            return e;
        }
        if (attempt == 1) throw NewtonDiverged(last_r, it);
    }
    throw NewtonDiverged(0, 0);  // unreachable
}

double kappa_distance(const Mat& G) {
    const int d = G.d;
    Eigen::MatrixXd M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = G(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    if (es.info() != Eigen::Success) throw EigSolverFailure("eigenvalue iteration failed");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
        std::complex<double> z = es.eigenvalues()(i);
        double dist = (z.real() > 0) ? std::abs(z) : std::abs(z.imag());
        best = std::min(best, dist);
    }
    return best;
}

double singular_time(const std::vector<Mat>& vacuum_grads) {
    double t = std::numeric_limits<double>::infinity();
    for (const Mat& G : vacuum_grads) {
        const int d = G.d;
        Eigen::MatrixXd M(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) M(i, j) = G(i, j);
        Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
        if (es.info() != Eigen::Success) throw EigSolverFailure("eigenvalue iteration failed");
        for (int i = 0; i < d; ++i) {
            std::complex<double> z = es.eigenvalues()(i);
            if (std::abs(z.imag()) <= 1e-10 * (1.0 + std::abs(z.real())) && z.real() < 0)
                t = std::min(t, -1.0 / z.real());
        }
    }
    return t;
}

namespace {

// Directions used to probe the image radius of the perturbation support.
std::vector<Vec> probe_directions(int d) {
    std::vector<Vec> dirs;
    if (d == 1) {
        dirs.push_back(Vec(1, 1));
        dirs.push_back(Vec(1, -1));
    } else if (d == 2) {
        for (int k = 0; k < 64; ++k) {
            double a = 2 * M_PI * k / 64;
            dirs.push_back(Vec(2, std::cos(a), std::sin(a)));
        }
    } else {
        // Fibonacci sphere
        const int n = 128;
        for (int k = 0; k < n; ++k) {
            double z = 1.0 - 2.0 * (k + 0.5) / n;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double a = k * 2.399963229728653;
            dirs.push_back(Vec(3, r * std::cos(a), r * std::sin(a), z));
        }
    }
    return dirs;
}

} // namespace

std::string DecayReport::csv() const {
    std::ostringstream os;
    os << "t,l,norm,predicted_exponent,fitted_exponent\n";
    char buf[160];
    for (const auto& r : rows) {
        double fitted = std::numeric_limits<double>::quiet_NaN();
        for (const auto& s : slopes)
            if (s.quantity == r.quantity) fitted = s.fitted;
        std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g\n", r.t, r.quantity.c_str(),
                      r.value, r.predicted_exponent, fitted);
        os << buf;
    }
    return os.str();
}

std::pair<double, double> fit_loglog(const std::vector<double>& t,
                                     const std::vector<double>& value) {
    if (t.size() != value.size() || t.size() < 3)
        throw FitDegenerate("need at least 3 samples for a slope fit");
    const size_t n = t.size();
    double sx = 0, sy = 0;
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(value[i] > 0)) throw FitDegenerate("slope fit needs positive values");
        xs[i] = std::log(1.0 + t[i]);
        ys[i] = std::log(value[i]);
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0) throw FitDegenerate("slope fit needs spread in t");
    const double slope = sxy / sxx;
    double sse = 0;
    for (size_t i = 0; i < n; ++i) {
        double e = ys[i] - my - slope * (xs[i] - mx);
        sse += e * e;
    }
    const double se = (n > 2) ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    return {slope, se};
}

DecayReport decay_report(const BurgersFlow& flow, int l_min, int l_max,
                         const std::vector<double>& t_grid, const Grid& grid, double fit_t0,
                         double fit_t1) {
    if (l_min < 2) throw ConfigError("decay_report covers l >= 2 (lower norms are not finite)");
    const int d = flow.dim();
    const InitialVelocity& iv = flow.init();
    DecayReport rep;

    auto dirs = probe_directions(d);

    for (double t : t_grid) {
        // Sampling box that tracks the support of the curvature part.
        double ext = grid.extent;
        if (iv.has_affine && iv.pert_radius > 0) {
            double rimg = 0;
            for (const Vec& e : dirs) {
                Vec x0 = iv.pert_center + iv.pert_radius * e;
                rimg = std::max(rimg, flow.forward(t, x0).maxabs());
            }
            ext = std::max(1.3 * rimg + 4 * iv.pert_radius / grid.n, grid.extent);
        }
        Grid gt(d, grid.n, ext);

        Field v = Field::vector(gt);
        Mat aff_grad(d);
        if (iv.has_affine) {
            Mat J = Mat::identity(d);
            J += t * iv.A;
            double dj = det(J);
            if (std::abs(dj) < 1e-12) throw SingularJacobian(std::abs(dj));
            aff_grad = inverse(J, dj) * iv.A;
        }
        double gmax = 0;
        std::vector<Vec> us(static_cast<size_t>(gt.points()), Vec(d));
        for (long p = 0; p < gt.points(); ++p) {
            Vec x = gt.point(p);
            auto e = flow.eval(t, x);
            us[static_cast<size_t>(p)] = e.u;
            double fro = 0;
            for (int i = 0; i < d * d; ++i) fro += e.grad.a[static_cast<size_t>(i)] * e.grad.a[static_cast<size_t>(i)];
            gmax = std::max(gmax, std::sqrt(fro));
            Vec w = e.u;
            if (iv.has_affine) w -= aff_grad * x;
            for (int c = 0; c < d; ++c) v.at(c, p) = w[c];
        }
        // Linear-growth bound |u(t,x)| <= |grad u|_inf |x|.
        for (long p = 0; p < gt.points(); ++p) {
            Vec x = gt.point(p);
            if (us[static_cast<size_t>(p)].norm() > 1.05 * gmax * x.norm() + 1e-9)
                throw Error("linear-growth bound violated by background flow sample");
        }

        SobolevNorms ns = sobolev(v, l_max);
        for (int l = l_min; l <= l_max; ++l) {
            DecayRow row;
            row.t = t;
            row.quantity = "grad" + std::to_string(l) + "_l2";
            row.value = ns.l2[static_cast<size_t>(l)];
            row.predicted_exponent = 0.5 * d - (l + 1);
            rep.rows.push_back(row);
        }

        if (flow.has_hess() && iv.pert_radius > 0) {
            // sup of grad^2 u along characteristics; footpoints live in the
            // fixed support of grad^2 u0, so a fixed x0 box samples it well.
            Grid gh(d, std::min(grid.n, 64), 1.05 * iv.pert_radius);
            double m2 = 0;
            for (long p = 0; p < gh.points(); ++p) {
                Vec x0 = gh.point(p) + iv.pert_center;
                auto H = flow.hess_along(t, x0);
                for (int i = 0; i < d; ++i) m2 = std::max(m2, H[static_cast<size_t>(i)].maxabs());
            }
            DecayRow row;
            row.t = t;
            row.quantity = "grad2_linf";
            row.value = m2;
            row.predicted_exponent = -3.0;
            rep.rows.push_back(row);
        }
    }

    // Slope fits per quantity over the window.
    std::vector<std::string> quantities;
    for (const auto& r : rep.rows)
        if (std::find(quantities.begin(), quantities.end(), r.quantity) == quantities.end())
            quantities.push_back(r.quantity);
    for (const auto& q : quantities) {
        std::vector<double> ts, vs;
        double pred = 0;
        for (const auto& r : rep.rows)
            if (r.quantity == q && r.t >= fit_t0 && r.t <= fit_t1 && r.value > 0) {
                ts.push_back(r.t);
                vs.push_back(r.value);
                pred = r.predicted_exponent;
            }
        if (ts.size() < 3) continue;
        auto [slope, se] = fit_loglog(ts, vs);
        rep.slopes.push_back({q, pred, slope, se});
    }
    return rep;
}

} // namespace nsvac
