#include "csflab/ambient.hpp"

#include <cmath>
#include <sstream>

#include "csflab/errors.hpp"

namespace csf {

std::string to_string(AmbientKind kind) {
  switch (kind) {
    case AmbientKind::EuclideanPlane: return "plane";
    case AmbientKind::FlatCylinder: return "cylinder";
    case AmbientKind::Sphere: return "sphere";
    case AmbientKind::HyperbolicDisc: return "hyperbolic";
  }
  return "unknown";
}

AmbientKind ambient_kind_from_string(const std::string& name) {
  if (name == "plane") return AmbientKind::EuclideanPlane;
  if (name == "cylinder") return AmbientKind::FlatCylinder;
  if (name == "sphere") return AmbientKind::Sphere;
  if (name == "hyperbolic") return AmbientKind::HyperbolicDisc;
  throw InvalidArgument("unknown ambient kind '" + name + "'");
}

AmbientSurface AmbientSurface::plane() { return {AmbientKind::EuclideanPlane, 0.0, 0.0, 0.0}; }

AmbientSurface AmbientSurface::cylinder(double circumference) {
  if (!(circumference > 0.0)) throw InvalidArgument("cylinder circumference must be positive");
  return {AmbientKind::FlatCylinder, 0.0, circumference, 0.0};
}

AmbientSurface AmbientSurface::sphere(double K0, double chart_radius) {
  if (!(K0 > 0.0)) throw InvalidArgument("sphere curvature must be positive");
  if (!(chart_radius > 0.0)) throw InvalidArgument("sphere chart radius must be positive");
  return {AmbientKind::Sphere, K0, 0.0, chart_radius};
}

AmbientSurface AmbientSurface::hyperbolic_disc(double K0) {
  if (!(K0 < 0.0)) throw InvalidArgument("hyperbolic curvature must be negative");
  return {AmbientKind::HyperbolicDisc, K0, 0.0, 1.0 / std::sqrt(-K0)};
}

bool AmbientSurface::in_domain(const Eigen::Vector2d& p) const {
  if (!p.allFinite()) return false;
  switch (kind_) {
    case AmbientKind::EuclideanPlane:
    case AmbientKind::FlatCylinder: return true;
    case AmbientKind::Sphere: return p.norm() <= chart_radius_;
    case AmbientKind::HyperbolicDisc: return 1.0 + K0_ * p.squaredNorm() > 0.0;
  }
  return false;
}

void AmbientSurface::require_in_domain(const Eigen::Vector2d& p) const {
  if (in_domain(p)) return;
  std::ostringstream os;
  os << "point (" << p.x() << ", " << p.y() << ") outside the " << to_string(kind_) << " chart";
  throw DomainError(os.str());
}

double AmbientSurface::conformal_factor(const Eigen::Vector2d& p) const {
  if (is_flat()) return 0.0;
  require_in_domain(p);
  return std::log(2.0 / (1.0 + K0_ * p.squaredNorm()));
}

Eigen::Vector2d AmbientSurface::conformal_gradient(const Eigen::Vector2d& p) const {
  if (is_flat()) return Eigen::Vector2d::Zero();
  require_in_domain(p);
  return (-2.0 * K0_ / (1.0 + K0_ * p.squaredNorm())) * p;
}

double AmbientSurface::conformal_laplacian(const Eigen::Vector2d& p) const {
  if (is_flat()) return 0.0;
  require_in_domain(p);
  const double f = 1.0 + K0_ * p.squaredNorm();
  return -4.0 * K0_ / (f * f);
}

double gauss_curvature(const AmbientSurface& ambient, const Eigen::Vector2d& p) {
  ambient.require_in_domain(p);
  const double phi = ambient.conformal_factor(p);
  return -std::exp(-2.0 * phi) * ambient.conformal_laplacian(p);
}

}  // namespace csf
