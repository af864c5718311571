#include "nsvac/norms.hpp"

#include <cmath>

#include "nsvac/operators.hpp"

namespace nsvac {

double integral(const Field& f) {
    if (f.ncomp() != 1) throw RankMismatch("integral expects a scalar field");
    double hd = std::pow(f.grid().spacing(), f.grid().dim);
    double s = 0;
    for (double v : f.raw()) s += v;
    return s * hd;
}

double inner(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid()) || a.ncomp() != b.ncomp())
        throw RankMismatch("inner-product shape mismatch");
    double hd = std::pow(a.grid().spacing(), a.grid().dim);
    const auto& av = a.raw();
    const auto& bv = b.raw();
    double s = 0;
    for (size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    return s * hd;
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

SobolevNorms sobolev(const Field& f, int up_to_k, int stencil_order) {
    if (up_to_k < 0 || up_to_k > 4) throw RankMismatch("sobolev supports k = 0..4");
    SobolevNorms out;
    out.l2[0] = l2_norm(f);
    out.linf = f.max_pointwise_norm();
    Field cur = f;
    for (int k = 1; k <= up_to_k; ++k) {
        cur = gradient(cur, stencil_order);
        out.l2[static_cast<size_t>(k)] = l2_norm(cur);
        if (k == 1) out.grad_linf = cur.max_pointwise_norm();
    }
    return out;
}

double h_norm(const SobolevNorms& n, int s) {
    double q = 0;
    for (int k = 0; k <= s; ++k) q += n.l2[static_cast<size_t>(k)] * n.l2[static_cast<size_t>(k)];
    return std::sqrt(q);
}

IdentityCheck discrete_identity_check(const Field& phi, const Field& w, int so) {
    if (phi.order() != 0 || w.order() != 1 || !(phi.grid() == w.grid()))
        throw RankMismatch("discrete_identity_check expects (scalar, vector) on one grid");
    const Grid& g = phi.grid();
    const int d = g.dim;
    const long npts = g.points();
    const double hd = std::pow(g.spacing(), d);
    const int ncub = d * d * d;

    Field phi2 = Field::scalar(g);
    for (long p = 0; p < npts; ++p) phi2.at(0, p) = phi.at(0, p) * phi.at(0, p);

    std::vector<Field> dphi2;
    for (int a = 0; a < d; ++a) dphi2.push_back(derivative(phi2, a, so));

    // Third and fourth gradients per velocity component.
    std::vector<Field> g3, g4;
    for (int i = 0; i < d; ++i) {
        Field wi = Field::scalar(g);
        for (long p = 0; p < npts; ++p) wi.at(0, p) = w.at(i, p);
        Field t = gradient(gradient(gradient(wi, so), so), so);
        g4.push_back(gradient(t, so));
        g3.push_back(std::move(t));
    }

    IdentityCheck out;

    Field t3div = gradient(gradient(gradient(divergence(w, so), so), so), so);
    for (int m = 0; m < ncub; ++m) {
        const double* v = t3div.comp(m);
        const double* p2 = phi2.comp(0);
        for (long p = 0; p < npts; ++p) out.lhs += p2[p] * v[p] * v[p];
    }
    out.lhs *= hd;

    for (int i = 0; i < d; ++i)
        for (int c = 0; c < g4[static_cast<size_t>(i)].ncomp(); ++c) {
            const double* v = g4[static_cast<size_t>(i)].comp(c);
            const double* p2 = phi2.comp(0);
            double s = 0;
            for (long p = 0; p < npts; ++p) s += p2[p] * v[p] * v[p];
            out.rhs += s;
        }
    out.rhs *= hd;

    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            double s = 0;
            for (int m = 0; m < ncub; ++m) {
                const double* a1 = g4[static_cast<size_t>(i)].comp(m * d + j);
                const double* b1 = g3[static_cast<size_t>(j)].comp(m);
                const double* a2 = g4[static_cast<size_t>(i)].comp(m * d + i);
                const double* di = dphi2[static_cast<size_t>(i)].comp(0);
                const double* dj = dphi2[static_cast<size_t>(j)].comp(0);
                for (long p = 0; p < npts; ++p)
                    s += di[p] * a1[p] * b1[p] - dj[p] * a2[p] * b1[p];
            }
            out.jstar += 2.0 * s * hd;
        }

    out.defect = out.lhs - out.rhs - out.jstar;
    return out;
}

} // namespace nsvac
