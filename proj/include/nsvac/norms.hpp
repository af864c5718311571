#ifndef NSVAC_NORMS_HPP_
#define NSVAC_NORMS_HPP_

#include <array>

#include "nsvac/field.hpp"

namespace nsvac {

/// Discrete Sobolev seminorms built from repeated first-difference gradients,
/// so they stay local and respect compact supports.
struct SobolevNorms {
    std::array<double, 5> l2{};  // l2[k] = |grad^k f|_2
    double linf = 0;             // max pointwise euclidean magnitude
    double grad_linf = 0;        // same for grad f
};

SobolevNorms sobolev(const Field& f, int up_to_k, int stencil_order = 2);

/// sqrt(sum_{k<=s} l2[k]^2), the discrete H^s norm.
double h_norm(const SobolevNorms& n, int s);

/// Rectangle-rule integral of a scalar field (exact trapezoid on periodic
/// grids).
double integral(const Field& f);

/// h^d-weighted L2 inner product over all components.
double inner(const Field& a, const Field& b);

/// h^d-weighted L2 norm over all components.
double l2_norm(const Field& f);

/// Both sides and the commutator remainder of the pointwise-weighted
/// divergence/full-gradient comparison
///   |phi grad^3 div w|_2^2 <= |phi grad^4 w|_2^2 + J*,
/// where J* collects the first-order commutator terms
///   J*_ij = int( d_i(phi^2) grad^3 d_j w_i . grad^3 w_j
///              - d_j(phi^2) grad^3 d_i w_i . grad^3 w_j ).
/// On the discrete periodic grid summation by parts is exact and the only
/// residual beyond J* is the O(h^2) Leibniz defect, returned as `defect`.
struct IdentityCheck {
    double lhs = 0;     // |phi grad^3 div w|_2^2
    double rhs = 0;     // |phi grad^4 w|_2^2
    double jstar = 0;   // commutator remainder
    double defect = 0;  // lhs - rhs - jstar (<= discretization error)
};

IdentityCheck discrete_identity_check(const Field& phi, const Field& w, int stencil_order = 2);

} // namespace nsvac

#endif
