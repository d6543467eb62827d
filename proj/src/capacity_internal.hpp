#pragma once

#include <vector>

#include "csflab/capacity.hpp"

namespace csf::detail {

ChartMap chart_for(const NestedAnnulus& annulus);
std::vector<cdouble> mapped_vertices(const PolyCurved& curve, const ChartMap& chart);
cdouble area_centroid(const std::vector<cdouble>& closed_polygon);

// Evaluation of the source representation at a solver-plane point w.
double plane_potential(const CapacitySolution& sol, cdouble w);
void plane_derivatives(const CapacitySolution& sol, cdouble w, cdouble& F, cdouble& dF);

}  // namespace csf::detail
