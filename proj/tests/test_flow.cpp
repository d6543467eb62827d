#include <cmath>
#include <numbers>

#include "csflab/analytic.hpp"
#include "csflab/flow.hpp"
#include "doctest.h"

using namespace csf;
using std::numbers::pi;

namespace {

double mean_radius(const PolyCurved& c) { return c.vertices.colwise().norm().mean(); }

// Radial chart speed of a centred circle in the sphere or hyperbolic chart.
// Sphere: geodesic curvature cot(theta) with r = tan(theta/2), speed scaled by e^{-phi} = (1 + r^2)/2.
// Disc: geodesic curvature coth(rho) with r = tanh(rho/2), speed scaled by (1 - r^2)/2.
// Both reduce to (1 + r^2)(r^2 - 1)/(4r).
double centred_circle_rate(double r) { return (1.0 + r * r) * (r * r - 1.0) / (4.0 * r); }

FlowConfig config(double t_end, Eigen::Index n = 256) {
  FlowConfig cfg;
  cfg.t_end = t_end;
  cfg.n_vertices = n;
  return cfg;
}

}  // namespace

TEST_CASE("csf_velocity") {
  SUBCASE("plane circle moves inward at unit speed") {
    const PolyCurved c = analytic::circle({0.0, 0.0}, 1.0, 256);
    const Vertices2<double> v = csf_velocity(c, AmbientSurface::plane());
    for (Eigen::Index i = 0; i < c.size(); ++i) CHECK(std::abs(-v.col(i).dot(c.vertex(i)) - 1.0) <= 1e-3);
    CHECK((v - discrete_curvature(c)).norm() == 0.0);
  }
  SUBCASE("cylinder geodesic is stationary") {
    const Vertices2<double> v = csf_velocity(analytic::axial_circle(0.3, 1.0, 64), AmbientSurface::cylinder());
    CHECK(v.colwise().norm().maxCoeff() <= 1e-12);
  }
  SUBCASE("sphere latitude circle") {
    const double r = std::tan(pi / 8.0);
    const PolyCurved c = analytic::circle({0.0, 0.0}, r, 256);
    const Vertices2<double> v = csf_velocity(c, AmbientSurface::sphere(1.0));
    for (Eigen::Index i = 0; i < c.size(); ++i)
      CHECK(v.col(i).dot(c.vertex(i).normalized()) == doctest::Approx(centred_circle_rate(r)).epsilon(1e-3));
  }
  SUBCASE("hyperbolic circle") {
    const double r = 0.4;
    const PolyCurved c = analytic::circle({0.0, 0.0}, r, 256);
    const Vertices2<double> v = csf_velocity(c, AmbientSurface::hyperbolic_disc(-1.0));
    CHECK(v.col(17).dot(c.vertex(17).normalized()) == doctest::Approx(centred_circle_rate(r)).epsilon(1e-3));
  }
  SUBCASE("equator of the sphere is a geodesic") {
    const Vertices2<double> v = csf_velocity(analytic::circle({0.0, 0.0}, 1.0, 256), AmbientSurface::sphere(1.0));
    CHECK(v.colwise().norm().maxCoeff() <= 1e-12);
  }
  SUBCASE("vertex outside the chart") {
    CHECK_THROWS_AS(csf_velocity(analytic::circle({0.0, 0.0}, 1.2, 64), AmbientSurface::hyperbolic_disc()), DomainError);
  }
}

TEST_CASE("stable_dt") {
  FlowConfig cfg = config(1.0);
  const double expect = 0.4 * std::pow(2.0 * std::sin(pi / 256), 2) / 2.0;
  CHECK(expect == doctest::Approx(1.205e-4).epsilon(1e-3));
  CHECK(stable_dt(analytic::concentric_annulus(1.0, 2.0, 256), cfg) == doctest::Approx(expect).epsilon(1e-12));

  const auto mixed = make_annulus(analytic::circle({0, 0}, 1.0, 512), analytic::circle({0, 0}, 2.0, 64),
                                  AmbientSurface::plane());
  CHECK(stable_dt(mixed, cfg) == doctest::Approx(0.4 * std::pow(2.0 * std::sin(pi / 512), 2) / 2.0).epsilon(1e-12));

  const auto tight = make_annulus(analytic::circle({0, 0}, 1.0, 256), analytic::circle({0, 0}, 1.0004, 256),
                                  AmbientSurface::plane());
  CHECK(stable_dt(tight, cfg) <= 1e-4);
}

TEST_CASE("csf_step") {
  const FlowConfig cfg = config(1.0);
  SUBCASE("concentric circles follow the radius law") {
    FlowState s{0.0, analytic::concentric_annulus(1.0, 2.0, 256)};
    const FlowState next = csf_step(s, cfg);
    const double dt = next.t;
    CHECK(dt == doctest::Approx(stable_dt(s.annulus, cfg)));
    CHECK(next.step_count == 1);
    CHECK(std::abs(mean_radius(next.annulus.inner) - std::sqrt(1.0 - 2.0 * dt)) <= dt * dt + 1e-3);
    CHECK(std::abs(mean_radius(next.annulus.outer) - std::sqrt(4.0 - 2.0 * dt)) <= dt * dt + 1e-3);
  }
  SUBCASE("cylinder geodesics only advance time") {
    FlowState s{0.0, analytic::cylinder_band(0.3, 0.8, 64)};
    const FlowState next = csf_step(s, cfg, 1e-3);
    CHECK(next.t == 1e-3);
    CHECK(next.annulus.inner.vertices == s.annulus.inner.vertices);
    CHECK(next.annulus.outer.vertices == s.annulus.outer.vertices);
  }
  SUBCASE("crossing curves are rejected") {
    FlowState s{0.0, analytic::concentric_annulus(1.0, 2.0, 64)};
    s.annulus.inner = analytic::circle({1.5, 0.0}, 1.0, 64);
    CHECK_THROWS_AS(csf_step(s, cfg), DegenerateFlowError);
  }
  SUBCASE("length never increases") {
    FlowState s{0.0, make_annulus(analytic::fourier_circle({0, 0}, 1.0, {{3, 0.1, 0.0}, {5, 0.05, 1.0}}, 128),
                                  analytic::circle({0, 0}, 2.0, 128), AmbientSurface::plane())};
    FlowConfig c = config(1.0, 128);
    for (int k = 0; k < 300; ++k) {
      const FlowState next = csf_step(s, c);
      CHECK(curve_length(next.annulus.inner) <= curve_length(s.annulus.inner) + 1e-6);
      CHECK(curve_length(next.annulus.outer) <= curve_length(s.annulus.outer) + 1e-6);
      s = next;
    }
  }
}

TEST_CASE("FlowConfig validation") {
  FlowConfig cfg = config(1.0);
  cfg.dt_safety = 0.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = config(-1.0);
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = config(1.0);
  cfg.record_every = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("csf_run") {
  SUBCASE("shrinking concentric circles") {
    FlowState last;
    const FlowTrace tr = csf_run(analytic::concentric_annulus(1.0, 2.0, 256), config(0.45),
                                 [&](const FlowState& s, TraceRecord&) { last = s; });
    REQUIRE(tr.records.size() >= 2);
    CHECK(tr.records.back().t == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(last.t == tr.records.back().t);
    CHECK(std::abs(mean_radius(last.annulus.inner) - std::sqrt(1.0 - 0.9)) <= 1e-3);
    CHECK(std::abs(mean_radius(last.annulus.outer) - std::sqrt(4.0 - 0.9)) <= 1e-3);
    for (size_t i = 1; i < tr.records.size(); ++i) {
      const auto &a = tr.records[i - 1], &b = tr.records[i];
      CHECK(b.t > a.t);
      const double dt = b.t - a.t;
      CHECK(std::abs(b.area_inner - a.area_inner + 2.0 * pi * dt) <= 0.01 * dt);
      CHECK(std::abs(b.area_outer - a.area_outer + 2.0 * pi * dt) <= 0.01 * dt);
      CHECK(std::abs(b.area_annulus - tr.records[0].area_annulus) <= 0.02 * b.t);
      CHECK(b.area_annulus == b.area_outer - b.area_inner);
      CHECK(std::isnan(b.h));
    }
  }
  SUBCASE("t_end = 0 duplicates the initial record") {
    const FlowTrace tr = csf_run(analytic::concentric_annulus(1.0, 2.0, 64), config(0.0, 64));
    REQUIRE(tr.records.size() == 2);
    CHECK(tr.records[0].t == 0.0);
    CHECK(tr.records[1].t == 0.0);
    CHECK(tr.records[1].area_inner == tr.records[0].area_inner);
  }
  SUBCASE("inner circle extinction collapses the annulus") {
    try {
      csf_run(analytic::concentric_annulus(1.0, 2.0, 64), config(0.55, 64));
      FAIL("expected an annulus collapse");
    } catch (const AnnulusCollapseError& e) {
      CHECK(e.time == doctest::Approx(0.5).epsilon(0.01));
      REQUIRE(e.partial_trace);
      CHECK(e.partial_trace->records.size() >= 1);
      CHECK(e.partial_trace->metadata.failure.has_value());
      CHECK(e.partial_trace->records.back().t <= e.time);
    }
  }
  SUBCASE("a generic annulus conserves its area") {
    const auto a = make_annulus(
        analytic::fourier_circle({0.05, 0.0}, 1.0, {{2, 0.1, 0.4}, {3, 0.06, 2.0}}, 256),
        analytic::fourier_circle({0.0, 0.0}, 2.0, {{3, 0.08, 1.0}, {4, 0.04, 0.2}}, 256), AmbientSurface::plane());
    const FlowTrace tr = csf_run(a, config(0.1));
    for (size_t i = 1; i < tr.records.size(); ++i) {
      const auto &p = tr.records[i - 1], &b = tr.records[i];
      const double dt = b.t - p.t;
      CHECK(std::abs(b.area_inner - p.area_inner + 2.0 * pi * dt) <= 0.01 * dt);
      CHECK(std::abs(b.area_annulus - tr.records[0].area_annulus) <= 0.02 * b.t);
    }
  }
}

TEST_CASE("circle law converges under refinement") {
  double prev = 0.0;
  for (Eigen::Index n : {32, 64, 128}) {
    FlowState last;
    csf_run(analytic::concentric_annulus(1.0, 2.0, n), config(0.2, n), [&](const FlowState& s, TraceRecord&) { last = s; });
    const double err = std::abs(mean_radius(last.annulus.inner) - std::sqrt(1.0 - 0.4));
    if (prev > 0.0) CHECK(prev / err >= 3.0);
    prev = err;
  }
}

TEST_CASE("cylinder geodesics are fixed points") {
  FlowState s{0.0, analytic::cylinder_band(0.3, 0.8, 64)};
  const NestedAnnulus start = s.annulus;
  const FlowConfig cfg = config(1.0, 64);
  for (int k = 0; k < 1000; ++k) s = csf_step(s, cfg);
  CHECK(s.step_count == 1000);
  CHECK((s.annulus.inner.vertices - start.inner.vertices).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((s.annulus.outer.vertices - start.outer.vertices).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("sphere latitude circles follow cos(theta) = cos(theta0) e^t") {
  FlowState last;
  csf_run(analytic::latitude_annulus(1.0, 1.4, 256), config(0.15),
          [&](const FlowState& s, TraceRecord&) { last = s; });
  CHECK(std::abs(mean_radius(last.annulus.inner) -
                 analytic::latitude_chart_radius(analytic::sphere_latitude_angle(1.0, last.t))) <= 1e-3);
  CHECK(std::abs(mean_radius(last.annulus.outer) -
                 analytic::latitude_chart_radius(analytic::sphere_latitude_angle(1.4, last.t))) <= 1e-3);
}
