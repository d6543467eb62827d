#pragma once

#include "csflab/ambient.hpp"
#include "csflab/geometry.hpp"

namespace csf {

/// Doubly connected region between two disjoint closed curves.
///
/// Both curves are stored counter-clockwise in the chart. On the cylinder both
/// wind once around the periodic direction and `inner` sits on the lower
/// axial side of `outer`.
struct NestedAnnulus {
  PolyCurved inner;
  PolyCurved outer;
  AmbientSurface ambient = AmbientSurface::plane();
};

/// Orients both curves counter-clockwise, attaches the chart period, and validates.
NestedAnnulus make_annulus(PolyCurved inner, PolyCurved outer, AmbientSurface ambient);

/// Throws InvalidArgument or DomainError on the first violated invariant.
void validate_annulus(const NestedAnnulus& annulus);

/// Chart area between the curves: area(outer) - area(inner).
double annulus_area(const NestedAnnulus& annulus);

/// Annulus-outward unit normals at the vertices of each boundary curve.
/// For the inner curve these point into the hole.
Vertices2<double> annulus_normals(const NestedAnnulus& annulus, bool outer);

}  // namespace csf
