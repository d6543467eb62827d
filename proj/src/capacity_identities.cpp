#include <cmath>
#include <limits>
#include <numbers>

#include "capacity_internal.hpp"
#include "csflab/capacity.hpp"
#include "periodic_interpolant.hpp"
#include "quadrature.hpp"

namespace csf {

Vertices2<double> boundary_gradient(const CapacitySolution& sol, const Vertices2<double>& points) {
  Vertices2<double> g(2, points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) g.col(i) = sol.gradient(points.col(i));
  return g;
}

EnergyVariation energy_variation_rhs(const NestedAnnulus& annulus, const CapacitySolution& sol,
                                     const Eigen::VectorXd& speed_inner, const Eigen::VectorXd& speed_outer) {
  if (speed_inner.size() != annulus.inner.size() || speed_outer.size() != annulus.outer.size())
    throw InvalidArgument("energy_variation_rhs: speed count does not match vertex count");

  EnergyVariation out;
  for (int side = 0; side < 2; ++side) {
    const bool is_outer = side == 1;
    const PolyCurved& c = is_outer ? annulus.outer : annulus.inner;
    const Eigen::VectorXd& speed = is_outer ? speed_outer : speed_inner;
    const Vertices2<double> grad = boundary_gradient(sol, c.vertices);
    const Vertices2<double> nu = annulus_normals(annulus, is_outer);
    const Eigen::VectorXd ds = dual_lengths(c);
    Eigen::VectorXd udot(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      out.dE_dt -= 0.5 * grad.col(i).squaredNorm() * speed(i) * ds(i);
      udot(i) = -speed(i) * grad.col(i).dot(nu.col(i));
    }
    (is_outer ? out.udot_outer : out.udot_inner) = std::move(udot);
  }
  return out;
}

double kappa_identity_residual(const NestedAnnulus& annulus, const CapacitySolution& sol) {
  double worst = 0.0;
  for (int side = 0; side < 2; ++side) {
    const bool is_outer = side == 1;
    const PolyCurved& c = is_outer ? annulus.outer : annulus.inner;
    const Vertices2<double> nu = annulus_normals(annulus, is_outer);
    // flipping the normal on the inner curve flips the sign of kappa
    const Eigen::VectorXd kappa = is_outer ? scalar_curvature(c) : Eigen::VectorXd(-scalar_curvature(c));
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const Eigen::Vector2d p = c.vertex(i);
      const cdouble F = sol.complex_gradient(p);
      const cdouble dF = sol.complex_hessian(p);
      const double g2 = std::norm(F);
      const double dn_g2 = 2.0 * std::real(std::conj(F) * dF * cdouble(nu(0, i), nu(1, i)));
      worst = std::max(worst, std::abs(0.5 * dn_g2 + kappa(i) * g2) / g2);
    }
  }
  return worst;
}

double energy_by_interior_quadrature(const NestedAnnulus& annulus, const CapacitySolution& sol, int n_around,
                                     int n_across) {
  const detail::PeriodicInterpolant inner(detail::mapped_vertices(annulus.inner, sol.chart));
  const detail::PeriodicInterpolant outer(detail::mapped_vertices(annulus.outer, sol.chart));

  // Align the outer parametrisation with the inner one so the blend segments do not twist.
  const auto in_pts = inner.sample(n_around);
  const auto out_pts = outer.sample(n_around);
  int best_shift = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_around; ++s) {
    double cost = 0.0;
    for (int j = 0; j < n_around; ++j) cost += std::norm(out_pts[(j + s) % n_around] - in_pts[j]);
    if (cost < best_cost) {
      best_cost = cost;
      best_shift = s;
    }
  }
  const double phase = static_cast<double>(best_shift) / n_around;

  const auto [nodes, weights] = detail::gauss_legendre(n_across);
  double integral = 0.0;
  int sign = 0;
  for (int j = 0; j < n_around; ++j) {
    const double s = static_cast<double>(j) / n_around;
    const cdouble g0 = inner.eval(s), g1 = outer.eval(s + phase);
    const cdouble d0 = inner.eval(s, 1), d1 = outer.eval(s + phase, 1);
    for (int q = 0; q < n_across; ++q) {
      const double lam = 0.5 * (nodes[q] + 1.0);
      const cdouble w = (1.0 - lam) * g0 + lam * g1;
      const cdouble ws = (1.0 - lam) * d0 + lam * d1;
      const cdouble wl = g1 - g0;
      const double jac = ws.real() * wl.imag() - ws.imag() * wl.real();
      const int sj = jac > 0.0 ? 1 : (jac < 0.0 ? -1 : 0);
      if (sj == 0 || (sign != 0 && sj != sign)) return std::numeric_limits<double>::quiet_NaN();
      sign = sj;
      cdouble F, dF;
      detail::plane_derivatives(sol, w, F, dF);
      integral += std::norm(F) * std::abs(jac) * 0.5 * weights[q] / n_around;
    }
  }
  return 0.5 * integral;
}

}  // namespace csf
