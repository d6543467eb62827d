#pragma once

// Harmonic capacity and conformal modulus of a NestedAnnulus.
//
// The potential u solves Laplace's equation in the annulus with u = 0 on the
// inner curve and u = 1 on the outer curve. Its Dirichlet energy
// E = 1/2 * integral |grad u|^2 is the capacity, and the modulus is h = 1/(2E),
// the height of the conformally equivalent cylinder (0, h) x S^1 whose circle
// has unit length. E is conformally invariant, so the solver works in the flat
// chart and ignores the conformal factor.

#include <complex>
#include <vector>

#include "csflab/annulus.hpp"
#include "csflab/trace.hpp"

namespace csf {

using cdouble = std::complex<double>;

struct SolverParams {
  int n_sources_per_boundary = 64;
  int collocation_factor = 2;
  double offset_ratio_in = 0.7;
  double offset_ratio_out = 1.3;
  int grid_n = 256;
  double residual_tolerance = 1e-6;

  void validate() const;
};

/// Holomorphic map from the chart to the plane the solver works in.
/// Identity for planar charts; w = exp(2 pi (z - axial_shift) / circumference)
/// unrolls a cylinder band into a planar annulus.
struct ChartMap {
  bool exponential = false;
  double circumference = 1.0;
  double axial_shift = 0.0;

  cdouble apply(cdouble z) const;
  cdouble derivative(cdouble z) const;
  cdouble second_derivative(cdouble z) const;
};

/// Fundamental-solution representation of the potential, in the solver plane:
///   U(w) = c + sum_j a_j log|w - p_j| + sum_k b_k log|w - q_k|
/// with p_j inside the inner curve and q_k outside the outer curve.
struct CapacitySolution {
  struct Sources {
    Vertices2<double> inner;
    Vertices2<double> outer;
  } source_points;
  struct Coefficients {
    Eigen::VectorXd inner;  // a_j
    Eigen::VectorXd outer;  // b_k
    double constant = 0.0;  // c
  } coefficients;
  double E = kNaN;
  double h = kNaN;
  double boundary_residual = kNaN;
  double flux = kNaN;
  ChartMap chart;

  bool has_sources() const { return source_points.inner.cols() > 0; }

  double potential(const Eigen::Vector2d& chart_point) const;
  /// Holomorphic derivative F = u_x - i u_y at a chart point; throws EvaluationError near a source.
  cdouble complex_gradient(const Eigen::Vector2d& chart_point) const;
  /// dF/dz at a chart point.
  cdouble complex_hessian(const Eigen::Vector2d& chart_point) const;
  Eigen::Vector2d gradient(const Eigen::Vector2d& chart_point) const;
};

/// Method of fundamental solutions: least-squares collocation of the boundary
/// conditions, solved by column-pivoted Householder QR. The modulus comes from
/// the flux of the inner sources, h = 1 / (2 pi sum_j a_j).
/// Throws SolverAccuracyError when the boundary residual exceeds the tolerance.
CapacitySolution solve_capacity_mfs(const NestedAnnulus& annulus, const SolverParams& params = {});

/// Low-order cross-check: 5-point Laplacian on a square grid with Dirichlet
/// values clipped to the nearest node outside the annulus, conjugate-gradient
/// solve, energy summed over grid edges. First-order accurate.
CapacitySolution solve_capacity_fd(const NestedAnnulus& annulus, const SolverParams& params = {});

double modulus(const NestedAnnulus& annulus, const SolverParams& params = {});

/// grad u at chart points by differentiating the source representation.
Vertices2<double> boundary_gradient(const CapacitySolution& sol, const Vertices2<double>& points);

struct EnergyVariation {
  double dE_dt = 0.0;
  /// Boundary values of the potential's time derivative, -phi * du/dnu, per vertex.
  Eigen::VectorXd udot_inner;
  Eigen::VectorXd udot_outer;
};

/// dE/dt = -1/2 * loop integral over both boundary curves of |grad u|^2 phi ds, with
/// phi the annulus-outward normal speed at each vertex, by the trapezoidal rule
/// in chart arc length.
EnergyVariation energy_variation_rhs(const NestedAnnulus& annulus, const CapacitySolution& sol,
                                     const Eigen::VectorXd& speed_inner, const Eigen::VectorXd& speed_outer);

/// max over boundary vertices of |1/2 d_nu |grad u|^2 + kappa |grad u|^2| / |grad u|^2,
/// with nu and kappa taken with respect to the annulus-outward normal.
double kappa_identity_residual(const NestedAnnulus& annulus, const CapacitySolution& sol);

/// 1/2 * integral of |grad u|^2 over the annulus, by tensor quadrature on the
/// blend of the two boundary curves (periodic trapezoid x Gauss-Legendre).
/// Returns NaN when the blend map folds over.
double energy_by_interior_quadrature(const NestedAnnulus& annulus, const CapacitySolution& sol,
                                     int n_around = 256, int n_across = 32);

}  // namespace csf
