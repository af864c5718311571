#include "nsvac/init_data.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsvac/norms.hpp"

namespace nsvac {

std::string to_string(DensityKind k) {
    switch (k) {
        case DensityKind::inverse_power: return "inverse_power";
        case DensityKind::bump_power: return "bump_power";
        case DensityKind::gaussian: return "gaussian";
        case DensityKind::anisotropic_power: return "anisotropic_power";
    }
    return "gaussian";
}

DensityKind density_kind_from_string(const std::string& s) {
    if (s == "inverse_power") return DensityKind::inverse_power;
    if (s == "bump_power") return DensityKind::bump_power;
    if (s == "gaussian") return DensityKind::gaussian;
    if (s == "anisotropic_power") return DensityKind::anisotropic_power;
    throw ConfigError("unknown density family: " + s);
}

std::string to_string(PerturbKind k) {
    switch (k) {
        case PerturbKind::none: return "none";
        case PerturbKind::gaussian_bump: return "gaussian_bump";
        case PerturbKind::slope_well: return "slope_well";
    }
    return "none";
}

PerturbKind perturb_kind_from_string(const std::string& s) {
    if (s == "none") return PerturbKind::none;
    if (s == "gaussian_bump") return PerturbKind::gaussian_bump;
    if (s == "slope_well") return PerturbKind::slope_well;
    throw ConfigError("unknown velocity perturbation: " + s);
}

namespace {

// C^inf bump g(s) = exp(-1/(1-s^2)) on |s| < 1, 0 outside, normalized to
// g(0) = 1.
double bump(double s) {
    double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

void check_sigma(const DensityFamily& f, const Params& p) {
    const double mx = std::max(1.0 / (p.delta - 1.0), 1.0 / (p.gamma - 1.0));
    std::ostringstream bad;
    switch (f.kind) {
        case DensityKind::inverse_power:
            if (!(f.sigma > 1.5 * mx))
                bad << "sigma_1 > 1.5*max{1/(delta-1),1/(gamma-1)} = " << 1.5 * mx;
            break;
        case DensityKind::bump_power:
            if (!(f.sigma > 3.0 * mx))
                bad << "sigma_2 > 3*max{1/(delta-1),1/(gamma-1)} = " << 3.0 * mx;
            break;
        case DensityKind::anisotropic_power:
            if (!(f.sigma > 1.5 * mx + 0.5))
                bad << "sigma_3 > 1.5*max{1/(delta-1),1/(gamma-1)} + 0.5 = " << 1.5 * mx + 0.5;
            break;
        case DensityKind::gaussian:
            break;
    }
    if (!(f.eps1 > 0)) bad << (bad.str().empty() ? "" : "; ") << "eps1 > 0";
    if (!bad.str().empty()) throw ConstraintViolated("density family: " + bad.str());
}

} // namespace

double density_at(const DensityFamily& f, const Vec& x) {
    Vec y = x - f.center;
    double r = y.norm();
    switch (f.kind) {
        case DensityKind::inverse_power:
            return f.eps1 / std::pow(1.0 + r, 2.0 * f.sigma);
        case DensityKind::bump_power:
            return f.eps1 * std::pow(bump(r / f.width), 2.0 * f.sigma);
        case DensityKind::gaussian:
            return f.eps1 * std::exp(-r * r / (f.width * f.width));
        case DensityKind::anisotropic_power:
            return f.eps1 * r / std::pow(1.0 + r, 2.0 * f.sigma);
    }
    return 0;
}

Field build_density(const DensityFamily& f, const Grid& g, const Params& p) {
    check_sigma(f, p);
    Field rho = Field::scalar(g);
    for (long q = 0; q < g.points(); ++q) rho.at(0, q) = density_at(f, g.point(q));
    return rho;
}

namespace {

struct Perturb {
    PerturbKind kind;
    double width;
    Vec center;
    int dim;

    double envelope(const Vec& y) const {
        return std::exp(-y.norm2() / (2.0 * width * width));
    }
    Vec value(const Vec& x) const {
        Vec y = x - center;
        Vec f(dim);
        if (kind == PerturbKind::none) return f;
        double E = envelope(y);
        if (kind == PerturbKind::gaussian_bump)
            f[0] = E;
        else
            f[0] = -y[0] * E;
        return f;
    }
    Mat grad(const Vec& x) const {
        Vec y = x - center;
        Mat m(dim);
        if (kind == PerturbKind::none) return m;
        double E = envelope(y);
        double s2 = width * width;
        if (kind == PerturbKind::gaussian_bump) {
            for (int j = 0; j < dim; ++j) m(0, j) = -y[j] / s2 * E;
        } else {
            for (int j = 0; j < dim; ++j) m(0, j) = E * ((j == 0 ? -1.0 : 0.0) + y[0] * y[j] / s2);
        }
        return m;
    }
    std::array<Mat, 3> hess(const Vec& x) const {
        Vec y = x - center;
        std::array<Mat, 3> h{Mat(dim), Mat(dim), Mat(dim)};
        if (kind == PerturbKind::none) return h;
        double E = envelope(y);
        double s2 = width * width;
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k) {
                if (kind == PerturbKind::gaussian_bump) {
                    h[0](j, k) = E * (y[j] * y[k] / (s2 * s2) - (j == k ? 1.0 / s2 : 0.0));
                } else {
                    double djk = (j == k) ? 1.0 : 0.0;
                    double dj0 = (j == 0) ? 1.0 : 0.0;
                    double dk0 = (k == 0) ? 1.0 : 0.0;
                    h[0](j, k) = E * (dj0 * y[k] / s2 + dk0 * y[j] / s2 + y[0] * djk / s2 -
                                      y[0] * y[j] * y[k] / (s2 * s2));
                }
            }
        return h;
    }
};

} // namespace

VelocityData build_velocity(const VelocityFamily& f, const Grid& g, const Params&) {
    const int d = g.dim;
    if (f.A.d != d || f.b.d > 3) throw ConfigError("velocity family dimension mismatch");

    // Eigenvalues of A against the claimed gap.
    Eigen::MatrixXd M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = f.A(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    if (es.info() != Eigen::Success) throw EigSolverFailure("eigenvalue iteration failed");
    if (f.enforce_gap) {
        for (int i = 0; i < d; ++i)
            if (!(es.eigenvalues()(i).real() > 2.0 * f.kappa)) {
                std::ostringstream os;
                os << "matrix eigenvalue " << es.eigenvalues()(i).real() << " not > 2*kappa = "
                   << 2.0 * f.kappa;
                throw ConstraintViolated(os.str());
            }
    }

    Perturb pert{f.pert, f.pert_width, f.pert_center, d};
    const Mat A = f.A;
    const double eps2 = f.eps2;
    // normalized data: u0(x) = A x + eps2 (f(x) - f(0)); shift = b + eps2 f(0)
    const Vec p0 = pert.value(Vec(d));
    Vec shift = f.b;
    shift += eps2 * p0;

    InitialVelocity iv;
    iv.dim = d;
    iv.kappa_claimed = f.kappa;
    iv.u0 = [A, eps2, pert, p0](const Vec& x) {
        Vec v = A * x;
        v += eps2 * (pert.value(x) - p0);
        return v;
    };
    iv.grad_u0 = [A, eps2, pert](const Vec& x) {
        Mat m = A;
        m += eps2 * pert.grad(x);
        return m;
    };
    iv.hess_u0 = [eps2, pert](const Vec& x) {
        auto h = pert.hess(x);
        for (auto& m : h) m *= eps2;
        return h;
    };
    iv.has_affine = true;
    iv.A = A;
    iv.pert_center = f.pert_center;
    iv.pert_radius = (f.pert == PerturbKind::none) ? 0.0 : 9.0 * f.pert_width;
    iv.pert_max = (f.pert == PerturbKind::none)
                      ? 0.0
                      : std::abs(eps2) * std::max(1.0, 0.61 * f.pert_width) + shift.maxabs();

    VelocityData out{Field::vector(g), iv, shift, 0.0};
    double min_gap = std::numeric_limits<double>::infinity();
    Vec bad_point(d);
    for (long q = 0; q < g.points(); ++q) {
        Vec x = g.point(q);
        Vec u = iv.u0(x);
        for (int c = 0; c < d; ++c) out.u0_grid.at(c, q) = u[c];
        double gap = kappa_distance(iv.grad_u0(x));
        if (gap < min_gap) {
            min_gap = gap;
            bad_point = x;
        }
    }
    out.min_kappa_distance = min_gap;
    if (f.enforce_gap && min_gap < f.kappa) {
        std::ostringstream os;
        os << "spectrum gap " << min_gap << " < kappa = " << f.kappa << " at sample (";
        for (int c = 0; c < d; ++c) os << (c ? "," : "") << bad_point[c];
        os << ")";
        throw ConstraintViolated(os.str());
    }

    // Analytic-Jacobian sanity probe.
    std::vector<Vec> probes;
    probes.push_back(Vec(d));
    probes.push_back(f.pert_center);
    Vec q1(d);
    for (int c = 0; c < d; ++c) q1[c] = 0.3 * (c + 1);
    probes.push_back(q1);
    if (iv.grad_consistency_error(probes, 1e-4) > 1e-6)
        throw ConstraintViolated("velocity Jacobian inconsistent with evaluator");

    return out;
}

double cutoff_profile(double s) {
    auto gexp = [](double v) { return v > 0 ? std::exp(-1.0 / v) : 0.0; };
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    double num = gexp(2.0 - s);
    return num / (num + gexp(s - 1.0));
}

Field cutoff(const Field& f, double R) {
    const Grid& g = f.grid();
    if (!(R > 0)) throw ConstraintViolated("cutoff radius must be positive");
    if (!(2.0 * R < g.extent - 2.0 * g.spacing()))
        throw SupportExceedsBox("cutoff support [0,2R] does not fit inside the box");
    Field out = f;
    for (long q = 0; q < g.points(); ++q) {
        double fac = cutoff_profile(g.point(q).norm() / R);
        for (int c = 0; c < f.ncomp(); ++c) out.at(c, q) *= fac;
    }
    return out;
}

ReformInit to_reform(const Field& rho0, const Params& p) {
    if (rho0.order() != 0) throw RankMismatch("to_reform expects a scalar density");
    const Grid& g = rho0.grid();
    ReformInit init{Field::scalar(g), Field::scalar(g), Field::vector(g)};
    const double pv = 0.5 * (p.delta - 1.0);
    const double pp = 0.5 * (p.gamma - 1.0);
    const double cp = std::sqrt(4.0 * p.A * p.gamma / ((p.gamma - 1.0) * (p.gamma - 1.0)));
    for (long q = 0; q < g.points(); ++q) {
        double rho = rho0.at(0, q);
        if (rho < 0) throw NegativeDensity("negative density in to_reform");
        // 0^p := 0; powers via exp(p log rho) only above the underflow floor
        double vph = (rho > 1e-300) ? std::exp(pv * std::log(rho)) : 0.0;
        double ph = (rho > 1e-300) ? cp * std::exp(pp * std::log(rho)) : 0.0;
        init.varphi0.at(0, q) = vph;
        init.phi0.at(0, q) = ph;
    }
    return init;
}

SmallnessReport smallness_report(const ReformInit& init, double D0, bool holds_P2) {
    SmallnessReport rep;
    rep.phi_h3 = h_norm(sobolev(init.phi0, 3), 3);
    rep.varphi_h3 = h_norm(sobolev(init.varphi0, 3), 3);
    rep.total = rep.phi_h3 + rep.varphi_h3;
    rep.D0 = D0;
    rep.varphi_nonbinding = holds_P2;
    rep.within = holds_P2 ? (rep.phi_h3 <= D0) : (rep.total <= D0);
    return rep;
}

} // namespace nsvac
