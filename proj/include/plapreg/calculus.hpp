#pragma once

#include "plapreg/field.hpp"

namespace plapreg {

/// Nodal gradient: central differences in the interior, one-sided
/// second-order differences (-3, 4, -1)/2h on the boundary. Exact for
/// polynomials of degree two along each axis.
VectorField gradient(const ScalarField& u);

/// Nodal divergence built from the same one-dimensional difference operator
/// as gradient(), applied to component a along axis a.
ScalarField divergence(const VectorField& field);

/// Flags nodes x with [x - delta, x + delta] inside the closed domain on
/// every axis. A delta larger than half the width gives an empty mask; that
/// is reported through InteriorMask::empty(), not by throwing.
InteriorMask interior_mask(const Grid& grid, double delta);

/// Every node of the grid, boundary included.
InteriorMask full_mask(const Grid& grid);

/// Trapezoid-weighted inner products.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);

/// Exact value of <F, gradient(phi)> + <divergence(F), phi> (trapezoid
/// weights) for phi vanishing on the boundary. Along each grid line of axis a
/// with end nodes 0 and N the stencil pair leaves
///
///   (F_0 (2 phi_1 - phi_2) - F_N (2 phi_{N-1} - phi_{N-2})) / 4
///
/// weighted by the transverse trapezoid weight. The interior part of the
/// central stencil is exactly skew-adjoint; only the one-sided rows leak.
double integration_by_parts_defect(const VectorField& field, const ScalarField& phi);

}  // namespace plapreg
