#include "nsvac/field.hpp"

#include <cmath>

namespace nsvac {

Field::Field(const Grid& g, int order) : grid_(g), order_(order), npts_(g.points()) {
    if (order < 0 || order > 6) throw RankMismatch("unsupported tensor order");
    ncomp_ = 1;
    for (int k = 0; k < order; ++k) ncomp_ *= g.dim;
    data_.assign(static_cast<size_t>(ncomp_) * npts_, 0.0);
}

void Field::fill(double v) {
    for (auto& x : data_) x = v;
}

bool Field::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

double Field::maxabs() const {
    double m = 0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

double Field::max_pointwise_norm() const {
    double m = 0;
    for (long p = 0; p < npts_; ++p) {
        double s = 0;
        for (int c = 0; c < ncomp_; ++c) {
            double v = at(c, p);
            s += v * v;
        }
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

static void check_same_shape(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid()) || a.ncomp() != b.ncomp())
        throw RankMismatch("field shape mismatch");
}

Field& Field::operator+=(const Field& o) {
    check_same_shape(*this, o);
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    check_same_shape(*this, o);
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

void axpy(double a, const Field& x, Field& y) {
    check_same_shape(x, y);
    const auto& xv = x.raw();
    auto& yv = y.raw();
    for (size_t i = 0; i < xv.size(); ++i) yv[i] += a * xv[i];
}

Field scale_by(const Field& s, const Field& f) {
    if (s.ncomp() != 1) throw RankMismatch("scale_by needs a scalar field");
    if (!(s.grid() == f.grid())) throw RankMismatch("scale_by grid mismatch");
    Field out = f;
    const double* sv = s.comp(0);
    for (int c = 0; c < out.ncomp(); ++c) {
        double* o = out.comp(c);
        for (long p = 0; p < out.npts(); ++p) o[p] *= sv[p];
    }
    return out;
}

} // namespace nsvac
