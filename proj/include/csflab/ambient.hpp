#pragma once

#include <Eigen/Dense>

#include <string>

namespace csf {

enum class AmbientKind { EuclideanPlane, FlatCylinder, Sphere, HyperbolicDisc };

std::string to_string(AmbientKind kind);
AmbientKind ambient_kind_from_string(const std::string& name);

/// Constant-curvature surface described by a conformal chart, metric e^{2 phi}(dx^2 + dy^2).
///
/// Sphere and hyperbolic disc share the factor phi = log(2 / (1 + K0 |p|^2)):
/// stereographic coordinates for K0 > 0 and the Poincare disc of radius
/// 1/sqrt(-K0) for K0 < 0. Plane and cylinder have phi = 0.
class AmbientSurface {
 public:
  static AmbientSurface plane();
  static AmbientSurface cylinder(double circumference = 1.0);
  /// `chart_radius` bounds how far from the origin (towards the projection pole) curves may go.
  static AmbientSurface sphere(double K0 = 1.0, double chart_radius = 10.0);
  static AmbientSurface hyperbolic_disc(double K0 = -1.0);

  AmbientKind kind() const { return kind_; }
  double K0() const { return K0_; }
  double circumference() const { return circumference_; }
  double chart_radius() const { return chart_radius_; }
  /// Period of the second chart coordinate; zero for non-periodic charts.
  double period() const { return kind_ == AmbientKind::FlatCylinder ? circumference_ : 0.0; }
  bool is_flat() const { return kind_ == AmbientKind::EuclideanPlane || kind_ == AmbientKind::FlatCylinder; }

  bool in_domain(const Eigen::Vector2d& p) const;
  /// Throws DomainError when p is outside the chart.
  void require_in_domain(const Eigen::Vector2d& p) const;

  double conformal_factor(const Eigen::Vector2d& p) const;
  Eigen::Vector2d conformal_gradient(const Eigen::Vector2d& p) const;
  double conformal_laplacian(const Eigen::Vector2d& p) const;

 private:
  AmbientSurface(AmbientKind kind, double K0, double circumference, double chart_radius)
      : kind_(kind), K0_(K0), circumference_(circumference), chart_radius_(chart_radius) {}

  AmbientKind kind_;
  double K0_;
  double circumference_;
  double chart_radius_;
};

/// K = -e^{-2 phi} * Laplacian(phi), evaluated from the chart's conformal factor.
double gauss_curvature(const AmbientSurface& ambient, const Eigen::Vector2d& p);

}  // namespace csf
