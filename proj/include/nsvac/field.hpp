#ifndef NSVAC_FIELD_HPP_
#define NSVAC_FIELD_HPP_

#include <vector>

#include "nsvac/grid.hpp"

namespace nsvac {

/// Tensor field of a given order on a Grid. Component count is dim^order:
/// order 0 scalar, 1 vector, 2 matrix. Higher orders appear as repeated
/// gradients inside the norm machinery. A component multi-index (c1..ck) is
/// flattened with the last (most recently appended derivative) index fastest,
/// so gradient(u) of a vector u stores (du_i/dx_j) at component i*dim + j.
class Field {
public:
    Field() = default;
    Field(const Grid& g, int order);

    static Field scalar(const Grid& g) { return Field(g, 0); }
    static Field vector(const Grid& g) { return Field(g, 1); }
    static Field matrix(const Grid& g) { return Field(g, 2); }

    const Grid& grid() const { return grid_; }
    int order() const { return order_; }
    int ncomp() const { return ncomp_; }
    long npts() const { return npts_; }

    double* comp(int c) { return data_.data() + static_cast<size_t>(c) * npts_; }
    const double* comp(int c) const { return data_.data() + static_cast<size_t>(c) * npts_; }

    double& at(int c, long p) { return data_[static_cast<size_t>(c) * npts_ + p]; }
    double at(int c, long p) const { return data_[static_cast<size_t>(c) * npts_ + p]; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    void fill(double v);
    bool all_finite() const;
    double maxabs() const;
    /// Pointwise euclidean magnitude maximum (over components jointly).
    double max_pointwise_norm() const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);

private:
    Grid grid_{};
    int order_ = 0;
    int ncomp_ = 1;
    long npts_ = 0;
    std::vector<double> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// y += a*x, shape-checked.
void axpy(double a, const Field& x, Field& y);

/// Pointwise product of a scalar field with any field (component-wise).
Field scale_by(const Field& scalar_field, const Field& f);

} // namespace nsvac

#endif
