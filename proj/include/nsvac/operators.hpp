#ifndef NSVAC_OPERATORS_HPP_
#define NSVAC_OPERATORS_HPP_

// Discrete differential operators on periodic grids: central stencils of
// order 2 (default) or 4. laplacian() is built as divergence-of-gradient of
// each component, so div(grad f) == lap f holds to rounding by construction.

#include "nsvac/field.hpp"
#include "nsvac/params.hpp"

namespace nsvac {

/// d/dx_axis with periodic wrap.
Field derivative(const Field& f, int axis, int stencil_order = 2);

/// Appends one derivative index (rank goes up by one).
Field gradient(const Field& f, int stencil_order = 2);

/// Vector field -> scalar, sum_i d_i v_i.
Field divergence(const Field& v, int stencil_order = 2);

/// Componentwise sum_a d_a d_a f (wide stencil, equals div(grad .)).
Field laplacian(const Field& f, int stencil_order = 2);

/// Elliptic core of the viscous term, per viscosity model:
///   standard:       L u = -alpha lap u - (alpha+beta) grad div u
///   gradient_form:  L u = -2 alpha lap u - beta grad div u
///   laplacian_only: L u = -alpha lap u
Field lame(const Field& u, const Params& p, int stencil_order = 2);

/// Viscous stress shape S(u); zero for the laplacian_only model, which has no
/// first-order source path.
Field stress_S(const Field& u, const Params& p, int stencil_order = 2);

/// Q(u) = delta/(delta-1) * S(u).
Field stress_Q(const Field& u, const Params& p, int stencil_order = 2);

/// Magnitudes of the Laplacian / grad-div coefficients in lame(), used by the
/// viscous time-step restriction.
double lame_coefficient_sum(const Params& p);

} // namespace nsvac

#endif
