#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <sstream>

#include "capacity_internal.hpp"
#include "csflab/capacity.hpp"
#include "periodic_interpolant.hpp"

namespace csf {

void SolverParams::validate() const {
  if (n_sources_per_boundary < 16) throw InvalidArgument("n_sources_per_boundary must be at least 16");
  if (collocation_factor < 1) throw InvalidArgument("collocation_factor must be at least 1");
  if (!(offset_ratio_in > 0.0 && offset_ratio_in < 1.0)) throw InvalidArgument("offset_ratio_in must lie in (0, 1)");
  if (!(offset_ratio_out > 1.0)) throw InvalidArgument("offset_ratio_out must exceed 1");
  if (grid_n < 16) throw InvalidArgument("grid_n must be at least 16");
  if (!(residual_tolerance > 0.0)) throw InvalidArgument("residual_tolerance must be positive");
}

cdouble ChartMap::apply(cdouble z) const {
  if (!exponential) return z;
  return std::exp((2.0 * std::numbers::pi / circumference) * (z - axial_shift));
}

cdouble ChartMap::derivative(cdouble z) const {
  if (!exponential) return 1.0;
  return (2.0 * std::numbers::pi / circumference) * apply(z);
}

cdouble ChartMap::second_derivative(cdouble z) const {
  if (!exponential) return 0.0;
  const double k = 2.0 * std::numbers::pi / circumference;
  return k * k * apply(z);
}

namespace detail {

ChartMap chart_for(const NestedAnnulus& a) {
  ChartMap m;
  if (a.ambient.kind() == AmbientKind::FlatCylinder) {
    m.exponential = true;
    m.circumference = a.ambient.circumference();
    m.axial_shift = 0.5 * (a.inner.vertices.row(0).mean() + a.outer.vertices.row(0).mean());
  }
  return m;
}

std::vector<cdouble> mapped_vertices(const PolyCurved& c, const ChartMap& chart) {
  std::vector<cdouble> out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) out[i] = chart.apply(cdouble(c.vertices(0, i), c.vertices(1, i)));
  return out;
}

cdouble area_centroid(const std::vector<cdouble>& pts) {
  const std::size_t n = pts.size();
  const cdouble origin = pts[0];
  double area2 = 0.0;
  cdouble acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cdouble p = pts[i] - origin;
    const cdouble q = pts[(i + 1) % n] - origin;
    const double cr = p.real() * q.imag() - p.imag() * q.real();
    area2 += cr;
    acc += (p + q) * cr;
  }
  return origin + acc / (3.0 * area2);
}

namespace {

void check_distance(cdouble d) {
  if (std::abs(d) < 1e-9) throw EvaluationError("evaluation point within 1e-9 of a source");
}

}  // namespace

double plane_potential(const CapacitySolution& sol, cdouble w) {
  double u = sol.coefficients.constant;
  const auto& s = sol.source_points;
  for (Eigen::Index j = 0; j < s.inner.cols(); ++j) {
    const cdouble d = w - cdouble(s.inner(0, j), s.inner(1, j));
    check_distance(d);
    u += sol.coefficients.inner(j) * std::log(std::abs(d));
  }
  for (Eigen::Index k = 0; k < s.outer.cols(); ++k) {
    const cdouble d = w - cdouble(s.outer(0, k), s.outer(1, k));
    check_distance(d);
    u += sol.coefficients.outer(k) * std::log(std::abs(d));
  }
  return u;
}

void plane_derivatives(const CapacitySolution& sol, cdouble w, cdouble& F, cdouble& dF) {
  F = 0.0;
  dF = 0.0;
  const auto& s = sol.source_points;
  for (Eigen::Index j = 0; j < s.inner.cols(); ++j) {
    const cdouble d = w - cdouble(s.inner(0, j), s.inner(1, j));
    check_distance(d);
    const cdouble inv = 1.0 / d;
    F += sol.coefficients.inner(j) * inv;
    dF -= sol.coefficients.inner(j) * inv * inv;
  }
  for (Eigen::Index k = 0; k < s.outer.cols(); ++k) {
    const cdouble d = w - cdouble(s.outer(0, k), s.outer(1, k));
    check_distance(d);
    const cdouble inv = 1.0 / d;
    F += sol.coefficients.outer(k) * inv;
    dF -= sol.coefficients.outer(k) * inv * inv;
  }
}

}  // namespace detail

namespace {

void require_sources(const CapacitySolution& sol) {
  if (!sol.has_sources()) throw EvaluationError("solution carries no source representation");
}

}  // namespace

double CapacitySolution::potential(const Eigen::Vector2d& p) const {
  require_sources(*this);
  return detail::plane_potential(*this, chart.apply(cdouble(p.x(), p.y())));
}

cdouble CapacitySolution::complex_gradient(const Eigen::Vector2d& p) const {
  require_sources(*this);
  const cdouble z(p.x(), p.y());
  cdouble F, dF;
  detail::plane_derivatives(*this, chart.apply(z), F, dF);
  return F * chart.derivative(z);
}

cdouble CapacitySolution::complex_hessian(const Eigen::Vector2d& p) const {
  require_sources(*this);
  const cdouble z(p.x(), p.y());
  cdouble F, dF;
  detail::plane_derivatives(*this, chart.apply(z), F, dF);
  const cdouble d1 = chart.derivative(z);
  return dF * d1 * d1 + F * chart.second_derivative(z);
}

Eigen::Vector2d CapacitySolution::gradient(const Eigen::Vector2d& p) const {
  const cdouble F = complex_gradient(p);
  return {F.real(), -F.imag()};
}

CapacitySolution solve_capacity_mfs(const NestedAnnulus& annulus, const SolverParams& params) {
  params.validate();
  validate_annulus(annulus);

  CapacitySolution sol;
  sol.chart = detail::chart_for(annulus);
  const detail::PeriodicInterpolant inner(detail::mapped_vertices(annulus.inner, sol.chart));
  const detail::PeriodicInterpolant outer(detail::mapped_vertices(annulus.outer, sol.chart));

  const int ns = params.n_sources_per_boundary;
  const int m = ns * params.collocation_factor;
  const auto inner_colloc = inner.sample(m);
  const auto outer_colloc = outer.sample(m);

  // Similarity normalization keeps the logarithms O(1); u is unchanged and only c shifts.
  const cdouble center = detail::area_centroid(inner_colloc);
  double scale = 0.0;
  for (const cdouble& w : outer_colloc) scale = std::max(scale, std::abs(w - center));
  auto to_unit = [&](cdouble w) { return (w - center) / scale; };

  const cdouble inner_centroid = detail::area_centroid(inner_colloc);
  const cdouble outer_centroid = detail::area_centroid(outer_colloc);
  std::vector<cdouble> src_in(ns), src_out(ns);
  {
    const auto on_inner = inner.sample(ns);
    const auto on_outer = outer.sample(ns);
    for (int j = 0; j < ns; ++j) {
      src_in[j] = to_unit(inner_centroid + params.offset_ratio_in * (on_inner[j] - inner_centroid));
      src_out[j] = to_unit(outer_centroid + params.offset_ratio_out * (on_outer[j] - outer_centroid));
    }
  }

  Eigen::MatrixXd A(2 * m, 1 + 2 * ns);
  Eigen::VectorXd rhs(2 * m);
  for (int side = 0; side < 2; ++side) {
    const auto& colloc = side == 0 ? inner_colloc : outer_colloc;
    for (int i = 0; i < m; ++i) {
      const int row = side * m + i;
      const cdouble z = to_unit(colloc[i]);
      A(row, 0) = 1.0;
      for (int j = 0; j < ns; ++j) {
        A(row, 1 + j) = std::log(std::abs(z - src_in[j]));
        A(row, 1 + ns + j) = std::log(std::abs(z - src_out[j]));
      }
      rhs(row) = side == 0 ? 0.0 : 1.0;
    }
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::VectorXd x = qr.solve(rhs);

  sol.coefficients.inner = x.segment(1, ns);
  sol.coefficients.outer = x.segment(1 + ns, ns);
  sol.coefficients.constant = x(0) - (sol.coefficients.inner.sum() + sol.coefficients.outer.sum()) * std::log(scale);
  sol.source_points.inner.resize(2, ns);
  sol.source_points.outer.resize(2, ns);
  for (int j = 0; j < ns; ++j) {
    const cdouble p = center + scale * src_in[j];
    const cdouble q = center + scale * src_out[j];
    sol.source_points.inner.col(j) << p.real(), p.imag();
    sol.source_points.outer.col(j) << q.real(), q.imag();
  }

  double residual = 0.0;
  for (int side = 0; side < 2; ++side) {
    const auto check = (side == 0 ? inner : outer).sample(4 * m);
    const double target = side == 0 ? 0.0 : 1.0;
    for (const cdouble& w : check) residual = std::max(residual, std::abs(detail::plane_potential(sol, w) - target));
  }
  sol.boundary_residual = residual;
  sol.flux = 2.0 * std::numbers::pi * sol.coefficients.inner.sum();
  sol.E = 0.5 * sol.flux;
  sol.h = 1.0 / sol.flux;

  if (!(residual <= params.residual_tolerance) || !(sol.flux > 0.0)) {
    std::ostringstream os;
    os << "MFS boundary residual " << residual << " exceeds tolerance " << params.residual_tolerance;
    throw SolverAccuracyError(os.str(), residual);
  }
  return sol;
}

double modulus(const NestedAnnulus& annulus, const SolverParams& params) {
  return solve_capacity_mfs(annulus, params).h;
}

}  // namespace csf
