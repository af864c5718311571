#ifndef NSVAC_LINALG_HPP_
#define NSVAC_LINALG_HPP_

// Small dense vectors/matrices with runtime dimension d <= 3, kept on the
// stack. These carry points, velocities and velocity Jacobians through the
// characteristic machinery, where a heap-backed matrix type would dominate
// the profile.

#include <array>
#include <cmath>
#include <cstdlib>

#include "nsvac/errors.hpp"

namespace nsvac {

struct Vec {
    int d = 3;
    std::array<double, 3> x{};

    Vec() = default;
    explicit Vec(int dim) : d(dim) {}
    Vec(int dim, double a, double b = 0, double c = 0) : d(dim), x{a, b, c} {}

    double& operator[](int i) { return x[static_cast<size_t>(i)]; }
    double operator[](int i) const { return x[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < d; ++i) x[i] += o.x[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < d; ++i) x[i] -= o.x[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < d; ++i) x[i] *= s;
        return *this;
    }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < d; ++i) s += x[i] * x[i];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }
    double maxabs() const {
        double m = 0;
        for (int i = 0; i < d; ++i) m = std::max(m, std::abs(x[i]));
        return m;
    }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.d; ++i) s += a[i] * b[i];
    return s;
}

struct Mat {
    int d = 3;
    std::array<double, 9> a{};

    Mat() = default;
    explicit Mat(int dim) : d(dim) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i * d + j)]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i * d + j)]; }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1;
        return m;
    }
    static Mat diag(int dim, double a0, double a1 = 0, double a2 = 0) {
        Mat m(dim);
        m(0, 0) = a0;
        if (dim > 1) m(1, 1) = a1;
        if (dim > 2) m(2, 2) = a2;
        return m;
    }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < d * d; ++i) a[i] += o.a[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < d * d; ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (int i = 0; i < d * d; ++i) a[i] *= s;
        return *this;
    }

    double maxabs() const {
        double m = 0;
        for (int i = 0; i < d * d; ++i) m = std::max(m, std::abs(a[i]));
        return m;
    }
};

inline Mat operator+(Mat a, const Mat& b) { return a += b; }
inline Mat operator-(Mat a, const Mat& b) { return a -= b; }
inline Mat operator*(double s, Mat a) { return a *= s; }

inline Mat operator*(const Mat& a, const Mat& b) {
    Mat c(a.d);
    for (int i = 0; i < a.d; ++i)
        for (int j = 0; j < a.d; ++j) {
            double s = 0;
            for (int k = 0; k < a.d; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline Vec operator*(const Mat& m, const Vec& v) {
    Vec r(m.d);
    for (int i = 0; i < m.d; ++i) {
        double s = 0;
        for (int j = 0; j < m.d; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline double det(const Mat& m) {
    switch (m.d) {
        case 1:
            return m(0, 0);
        case 2:
            return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        default:
            return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                   m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                   m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
}

// Inverse via adjugate; caller checks det. Dimensions are at most 3, so this
// beats any factorization.
inline Mat inverse(const Mat& m, double dt) {
    Mat inv(m.d);
    switch (m.d) {
        case 1:
            inv(0, 0) = 1.0 / dt;
            break;
        case 2:
            inv(0, 0) = m(1, 1) / dt;
            inv(0, 1) = -m(0, 1) / dt;
            inv(1, 0) = -m(1, 0) / dt;
            inv(1, 1) = m(0, 0) / dt;
            break;
        default:
            inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / dt;
            inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / dt;
            inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / dt;
            inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / dt;
            inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / dt;
            inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / dt;
            inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / dt;
            inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / dt;
            inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / dt;
    }
    return inv;
}

inline Vec solve(const Mat& m, const Vec& rhs) {
    double dt = det(m);
    if (std::abs(dt) < 1e-300) throw SingularJacobian(std::abs(dt));
    return inverse(m, dt) * rhs;
}

} // namespace nsvac

#endif
