#include "nsvac/operators.hpp"

#include <cmath>

namespace nsvac {

namespace {

// One periodic central-difference pass over a single component array.
void diff_axis(const double* in, double* out, const Grid& g, int axis, int order) {
    const int n = g.n;
    const long s = g.stride(axis);
    const long npts = g.points();
    const double h = g.spacing();

    if (order == 2) {
        const double c1 = 1.0 / (2.0 * h);
        for (long p = 0; p < npts; ++p) {
            const int i = static_cast<int>((p / s) % n);
            const long pp = p + ((i + 1) % n - i) * s;
            const long pm = p + ((i + n - 1) % n - i) * s;
            out[p] = c1 * (in[pp] - in[pm]);
        }
    } else if (order == 4) {
        const double c1 = 8.0 / (12.0 * h);
        const double c2 = 1.0 / (12.0 * h);
        for (long p = 0; p < npts; ++p) {
            const int i = static_cast<int>((p / s) % n);
            const long pp1 = p + ((i + 1) % n - i) * s;
            const long pm1 = p + ((i + n - 1) % n - i) * s;
            const long pp2 = p + ((i + 2) % n - i) * s;
            const long pm2 = p + ((i + n - 2) % n - i) * s;
            out[p] = c1 * (in[pp1] - in[pm1]) - c2 * (in[pp2] - in[pm2]);
        }
    } else {
        throw ConfigError("stencil order must be 2 or 4");
    }
}

} // namespace

Field derivative(const Field& f, int axis, int stencil_order) {
    if (axis < 0 || axis >= f.grid().dim) throw RankMismatch("derivative axis out of range");
    Field out(f.grid(), f.order());
    for (int c = 0; c < f.ncomp(); ++c)
        diff_axis(f.comp(c), out.comp(c), f.grid(), axis, stencil_order);
    return out;
}

Field gradient(const Field& f, int stencil_order) {
    const int d = f.grid().dim;
    Field out(f.grid(), f.order() + 1);
    for (int c = 0; c < f.ncomp(); ++c)
        for (int a = 0; a < d; ++a)
            diff_axis(f.comp(c), out.comp(c * d + a), f.grid(), a, stencil_order);
    return out;
}

Field divergence(const Field& v, int stencil_order) {
    if (v.order() != 1) throw RankMismatch("divergence expects a vector field");
    const int d = v.grid().dim;
    Field out = Field::scalar(v.grid());
    Field tmp = Field::scalar(v.grid());
    for (int a = 0; a < d; ++a) {
        diff_axis(v.comp(a), tmp.comp(0), v.grid(), a, stencil_order);
        axpy(1.0, tmp, out);
    }
    return out;
}

Field laplacian(const Field& f, int stencil_order) {
    const int d = f.grid().dim;
    Field out(f.grid(), f.order());
    Field t1(f.grid(), 0), t2(f.grid(), 0);
    for (int c = 0; c < f.ncomp(); ++c) {
        for (int a = 0; a < d; ++a) {
            diff_axis(f.comp(c), t1.comp(0), f.grid(), a, stencil_order);
            diff_axis(t1.comp(0), t2.comp(0), f.grid(), a, stencil_order);
            double* o = out.comp(c);
            const double* s = t2.comp(0);
            for (long p = 0; p < out.npts(); ++p) o[p] += s[p];
        }
    }
    return out;
}

Field lame(const Field& u, const Params& p, int stencil_order) {
    if (u.order() != 1) throw RankMismatch("lame expects a vector field");
    double c_lap = 0, c_gd = 0;
    switch (p.model) {
        case ViscosityModel::standard:
            c_lap = p.alpha;
            c_gd = p.alpha + p.beta;
            break;
        case ViscosityModel::gradient_form:
            c_lap = 2.0 * p.alpha;
            c_gd = p.beta;
            break;
        case ViscosityModel::laplacian_only:
            c_lap = p.alpha;
            c_gd = 0.0;
            break;
    }
    Field out = laplacian(u, stencil_order);
    out *= -c_lap;
    if (c_gd != 0.0) {
        Field gd = gradient(divergence(u, stencil_order), stencil_order);
        axpy(-c_gd, gd, out);
    }
    return out;
}

double lame_coefficient_sum(const Params& p) {
    switch (p.model) {
        case ViscosityModel::standard:
            return p.alpha + std::abs(p.alpha + p.beta);
        case ViscosityModel::gradient_form:
            return 2.0 * p.alpha + std::abs(p.beta);
        case ViscosityModel::laplacian_only:
            return p.alpha;
    }
    return p.alpha;
}

Field stress_S(const Field& u, const Params& p, int stencil_order) {
    if (u.order() != 1) throw RankMismatch("stress_S expects a vector field");
    const int d = u.grid().dim;
    Field out = Field::matrix(u.grid());
    if (p.model == ViscosityModel::laplacian_only) return out;

    Field gu = gradient(u, stencil_order);          // (i,j) -> d_j u_i
    Field dv = divergence(u, stencil_order);
    const double* divu = dv.comp(0);

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double* o = out.comp(i * d + j);
            const double* gij = gu.comp(i * d + j);
            const double* gji = gu.comp(j * d + i);
            for (long q = 0; q < out.npts(); ++q) {
                double v;
                if (p.model == ViscosityModel::standard)
                    v = p.alpha * (gij[q] + gji[q]);
                else
                    v = 2.0 * p.alpha * gij[q];
                if (i == j) v += p.beta * divu[q];
                o[q] = v;
            }
        }
    return out;
}

Field stress_Q(const Field& u, const Params& p, int stencil_order) {
    if (p.delta <= 1.0) throw ConstraintViolated("stress_Q needs delta > 1");
    Field s = stress_S(u, p, stencil_order);
    s *= p.delta / (p.delta - 1.0);
    return s;
}

} // namespace nsvac
