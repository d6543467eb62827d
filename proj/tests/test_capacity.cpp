#include <cmath>
#include <numbers>
#include <random>

#include "csflab/analytic.hpp"
#include "csflab/capacity.hpp"
#include "csflab/flow.hpp"
#include "doctest.h"

using namespace csf;
using std::numbers::pi;

namespace {

const double kH12 = std::log(2.0) / (2.0 * pi);

NestedAnnulus reindexed(const NestedAnnulus& a, Eigen::Index shift_inner, Eigen::Index shift_outer) {
  auto roll = [](const PolyCurved& c, Eigen::Index k) {
    PolyCurved out = c;
    for (Eigen::Index i = 0; i < c.size(); ++i) out.vertices.col(i) = c.vertices.col((i + k) % c.size());
    return out;
  };
  return make_annulus(roll(a.inner, shift_inner), roll(a.outer, shift_outer), a.ambient);
}

}  // namespace

TEST_CASE("solve_capacity_mfs examples") {
  const auto a = analytic::concentric_annulus(1.0, 2.0, 256);
  const CapacitySolution sol = solve_capacity_mfs(a);
  CHECK(std::abs(sol.h - kH12) <= 1e-6);
  CHECK(sol.boundary_residual <= 1e-6);
  CHECK(sol.h * 2.0 * sol.E == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sol.flux == doctest::Approx(2.0 * pi * sol.coefficients.inner.sum()).epsilon(1e-14));
  CHECK(sol.flux == doctest::Approx(2.0 * sol.E).epsilon(1e-14));
  CHECK(sol.source_points.inner.cols() == 64);
  CHECK(sol.source_points.outer.cols() == 64);

  SUBCASE("eccentric Mobius image keeps the modulus") {
    const auto img = analytic::mobius_transform(a, {0.3, 0.0});
    CHECK(std::abs(solve_capacity_mfs(img.annulus).h - kH12) <= 1e-5);
  }
  SUBCASE("cylinder band is literally (0, 0.5) x S^1") {
    const CapacitySolution cyl = solve_capacity_mfs(analytic::cylinder_band(0.3, 0.8, 64, 1.0));
    CHECK(std::abs(cyl.h - 0.5) <= 1e-6);
    CHECK(cyl.potential({0.3, 0.17}) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(cyl.potential({0.55, 0.61}) == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("other circumference") {
    const CapacitySolution cyl = solve_capacity_mfs(analytic::cylinder_band(0.0, 1.0, 64, 2.0));
    CHECK(std::abs(cyl.h - 0.5) <= 1e-6);
  }
}

TEST_CASE("solve_capacity_fd") {
  const auto a = analytic::concentric_annulus(1.0, 2.0, 256);
  SolverParams p;
  const CapacitySolution fd256 = solve_capacity_fd(a, p);
  CHECK(std::abs(fd256.h - kH12) <= 2e-3);
  CHECK(fd256.source_points.inner.cols() == 0);
  CHECK(fd256.h * 2.0 * fd256.E == doctest::Approx(1.0).epsilon(1e-14));

  p.grid_n = 512;
  const CapacitySolution fd512 = solve_capacity_fd(a, p);
  CHECK(std::abs(fd256.h - kH12) / std::abs(fd512.h - kH12) >= 1.5);

  SUBCASE("MFS and FD agree within three times the FD self-convergence error") {
    const double h_mfs = solve_capacity_mfs(a).h;
    CHECK(std::abs(h_mfs - fd256.h) <= 3.0 * std::abs(fd256.h - fd512.h));
  }
  SUBCASE("cylinder band") {
    SolverParams q;
    q.grid_n = 128;
    CHECK(std::abs(solve_capacity_fd(analytic::cylinder_band(0.3, 0.8, 64), q).h - 0.5) <= 2e-2);
  }
  SUBCASE("curves closer than two cells") {
    CHECK_THROWS_AS(solve_capacity_fd(analytic::concentric_annulus(1.0, 1.005, 256), SolverParams{}), ResolutionError);
  }
}

TEST_CASE("modulus") {
  CHECK(std::abs(modulus(analytic::concentric_annulus(1.0, 2.0, 256)) - kH12) <= 1e-6);
  CHECK(std::abs(modulus(analytic::concentric_annulus(1.0, std::exp(2.0 * pi), 256)) - 1.0) <= 1e-6);
  CHECK_THROWS_AS(modulus(analytic::concentric_annulus(1.5, 1.5, 256)), InvalidArgument);
}

TEST_CASE("SolverParams validation") {
  SolverParams p;
  p.offset_ratio_in = 1.1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.n_sources_per_boundary = 8;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.offset_ratio_out = 0.9;
  CHECK_THROWS_AS(solve_capacity_mfs(analytic::concentric_annulus(1.0, 2.0, 64), p), InvalidArgument);
}

TEST_CASE("boundary_gradient") {
  const auto a = analytic::concentric_annulus(1.0, 2.0, 256);
  const CapacitySolution sol = solve_capacity_mfs(a);
  Vertices2<double> pts(2, 2);
  pts << 2, 0, 0, 1;
  const Vertices2<double> g = boundary_gradient(sol, pts);
  CHECK(std::abs(g(0, 0) - 1.0 / (2.0 * std::log(2.0))) <= 1e-5);
  CHECK(std::abs(g(1, 0)) <= 1e-5);
  CHECK(std::abs(g.col(1).norm() - 1.0 / std::log(2.0)) <= 1e-5);
  CHECK(std::abs(g(0, 1)) <= 1e-5);

  SUBCASE("gradient is normal to the boundary") {
    for (bool outer : {false, true}) {
      const PolyCurved& c = outer ? a.outer : a.inner;
      const Vertices2<double> gb = boundary_gradient(sol, c.vertices);
      const Vertices2<double> nu = annulus_normals(a, outer);
      for (Eigen::Index i = 0; i < c.size(); ++i) {
        const Eigen::Vector2d tangent(-nu(1, i), nu(0, i));
        // derivatives sit above the roundoff floor of the potential itself
        CHECK(std::abs(gb.col(i).dot(tangent)) <= 10.0 * std::max(sol.boundary_residual, 1e-10));
      }
    }
  }
  SUBCASE("cylinder band has a constant axial gradient") {
    const auto band = analytic::cylinder_band(0.3, 0.8, 64);
    const CapacitySolution cyl = solve_capacity_mfs(band);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(0.3, 0.8), uy(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
      const Eigen::Vector2d gi = cyl.gradient({ux(rng), uy(rng)});
      CHECK(std::abs(gi(0) - 2.0) <= 1e-6);
      CHECK(std::abs(gi(1)) <= 1e-6);
    }
  }
  SUBCASE("evaluation at a source") {
    CHECK_THROWS_AS(sol.gradient(sol.source_points.inner.col(3)), EvaluationError);
  }
}

TEST_CASE("energy_variation_rhs") {
  const double r1 = 1.0, r2 = 2.0;
  const auto a = analytic::concentric_annulus(r1, r2, 256);
  const CapacitySolution sol = solve_capacity_mfs(a);
  const double exact = -pi * (1.0 / (r1 * r1) - 1.0 / (r2 * r2)) / std::pow(std::log(r2 / r1), 2);
  CHECK(exact == doctest::Approx(-4.9040).epsilon(1e-4));

  const EnergyVariation ev = energy_variation_rhs(a, sol, csf_normal_speed(a, false), csf_normal_speed(a, true));
  CHECK(std::abs(ev.dE_dt - exact) <= 0.01 * std::abs(exact));
  // the inner curve moves into the hole (phi = 1) against du/dnu = -1/log 2
  CHECK(ev.udot_inner.mean() == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-3));
  CHECK(ev.udot_outer.mean() == doctest::Approx(1.0 / (4.0 * std::log(2.0))).epsilon(1e-3));

  const Eigen::VectorXd zero_in = Eigen::VectorXd::Zero(a.inner.size()), zero_out = Eigen::VectorXd::Zero(a.outer.size());
  CHECK(energy_variation_rhs(a, sol, zero_in, zero_out).dE_dt == 0.0);

  const auto band = analytic::cylinder_band(0.3, 0.8, 64);
  const CapacitySolution cyl = solve_capacity_mfs(band);
  CHECK(std::abs(energy_variation_rhs(band, cyl, csf_normal_speed(band, false), csf_normal_speed(band, true)).dE_dt) <= 1e-12);

  CHECK_THROWS_AS(energy_variation_rhs(a, sol, Eigen::VectorXd::Zero(3), zero_out), InvalidArgument);
}

TEST_CASE("kappa_identity_residual") {
  const auto a = analytic::concentric_annulus(1.0, 2.0, 256);
  CHECK(kappa_identity_residual(a, solve_capacity_mfs(a)) <= 0.01);
  const auto band = analytic::cylinder_band(0.3, 0.8, 64);
  SolverParams fine;
  fine.n_sources_per_boundary = 128;
  CHECK(kappa_identity_residual(band, solve_capacity_mfs(band, fine)) <= 1e-8);
  CHECK(kappa_identity_residual(band, solve_capacity_mfs(band)) <= 1e-7);
  const auto img = analytic::mobius_transform(a, {0.3, 0.0});
  CHECK(kappa_identity_residual(img.annulus, solve_capacity_mfs(img.annulus)) <= 0.02);
}

TEST_CASE("flux-energy identity against interior quadrature") {
  const auto a = analytic::concentric_annulus(1.0, 2.0, 256);
  for (const NestedAnnulus& ann : {a, analytic::mobius_transform(a, {0.2, -0.25}).annulus,
                                   analytic::cylinder_band(0.3, 0.8, 64)}) {
    const CapacitySolution sol = solve_capacity_mfs(ann);
    const double e_quad = energy_by_interior_quadrature(ann, sol);
    REQUIRE(std::isfinite(e_quad));
    CHECK(std::abs(sol.flux - 2.0 * e_quad) / (2.0 * sol.E) <= 1e-8);
  }
}

TEST_CASE("conformal invariance under random Mobius maps") {
  const auto a = analytic::concentric_annulus(1.0, 2.0, 256);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> rad(0.0, 0.6), ang(0.0, 2.0 * pi);
  for (int i = 0; i < 20; ++i) {
    const auto img = analytic::mobius_transform(a, std::polar(rad(rng), ang(rng)));
    CHECK(std::abs(modulus(img.annulus) - kH12) <= 1e-4);
  }
}

TEST_CASE("domain monotonicity") {
  CHECK(analytic::concentric_modulus(1.1, 1.9) < analytic::concentric_modulus(1.0, 2.0));
  CHECK(modulus(analytic::concentric_annulus(1.1, 1.9, 256)) < modulus(analytic::concentric_annulus(1.0, 2.0, 256)));
}

TEST_CASE("vertex re-indexing does not change the modulus") {
  const auto a = analytic::concentric_annulus(1.0, 2.0, 256);
  const auto gen = make_annulus(
      analytic::fourier_circle({0.1, 0.0}, 1.0, {{2, 0.08, 0.3}, {3, 0.05, 1.1}}, 256),
      analytic::fourier_circle({0.0, 0.0}, 2.2, {{3, 0.06, 0.7}, {5, 0.03, 2.0}}, 256), AmbientSurface::plane());
  SolverParams p;
  p.n_sources_per_boundary = 128;
  for (const NestedAnnulus& ann : {a, gen}) {
    const double h0 = modulus(ann, p);
    for (auto [si, so] : {std::pair<Eigen::Index, Eigen::Index>{1, 0}, {0, 37}, {101, 202}})
      CHECK(std::abs(modulus(reindexed(ann, si, so), p) - h0) <= 1e-10);
  }
}
