#pragma once

// Closed-form solutions used as oracles for the numerical pipeline.

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "csflab/annulus.hpp"
#include "csflab/flow.hpp"

namespace csf::analytic {

/// Radius of a shrinking planar circle, r(t) = sqrt(r0^2 - 2t) from dr/dt = -1/r.
/// Throws ExtinctionError once t >= r0^2 / 2.
double circle_radius(double r0, double t);

/// Modulus of the round annulus r1 < |z| < r2: log(r2/r1) / (2 pi).
double concentric_modulus(double r1, double r2);

/// Open polyline on the translating soliton x = -log cos y, uniformly sampled
/// in y over [-y_max, y_max]. Exactly symmetric under y -> -y.
PolyCurved grim_reaper(Eigen::Index n, double y_max);

/// Same curve sampled uniformly in arc length (s = asinh(tan y)).
PolyCurved grim_reaper_arclength(Eigen::Index n, double y_max);

/// Distance from p to the soliton translated by `shift` in x, restricted to |y| <= y_max.
double grim_reaper_distance(const Eigen::Vector2d& p, double y_max, double shift);

/// Evolves the truncated soliton for time tau with its endpoints pinned to the
/// exact solution (moving along the translate as normal motion carries them:
/// tan y(t) = tan y(0) e^{-t}), then returns the largest vertex distance to the
/// curve translated by tau. Uses cfg.dt_safety and cfg.resample_threshold.
double grim_reaper_translation_check(Eigen::Index n, double y_max, double tau, const FlowConfig& cfg);

/// Polar angle of a latitude circle on the sphere of curvature K0 under the flow:
/// d(theta)/dt = -K0 cot(theta), i.e. cos(theta(t)) = cos(theta0) * exp(K0 t).
/// Throws ExtinctionError when the cap shrinks to a pole.
double sphere_latitude_angle(double theta0, double t, double K0 = 1.0);

/// Chart radius of the latitude circle at polar angle theta in the stereographic
/// chart with conformal factor log(2 / (1 + K0 |p|^2)): tan(theta/2) / sqrt(K0).
double latitude_chart_radius(double theta, double K0 = 1.0);

struct MobiusImage {
  NestedAnnulus annulus;
  double prescale = 1.0;  // applied before the map
};

/// Image of a planar annulus under z -> (s z - a) / (1 - conj(a) s z) with
/// s = 1 / (2 max |z|) placing both curves inside the unit disc.
MobiusImage mobius_transform(const NestedAnnulus& annulus, std::complex<double> a);

struct FourierMode {
  int mode = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

PolyCurved circle(const Eigen::Vector2d& center, double radius, Eigen::Index n);

/// r(s) = radius * (1 + sum amplitude * cos(2 pi mode s + phase)), with vertices
/// on the smooth curve at (nearly) equal arc-length spacing.
PolyCurved fourier_circle(const Eigen::Vector2d& center, double radius, const std::vector<FourierMode>& modes,
                          Eigen::Index n);

/// Cylinder geodesic at axial coordinate x, traversed upward.
PolyCurved axial_circle(double x, double circumference, Eigen::Index n);

NestedAnnulus concentric_annulus(double r1, double r2, Eigen::Index n);
NestedAnnulus cylinder_band(double x1, double x2, Eigen::Index n, double circumference = 1.0);
NestedAnnulus latitude_annulus(double theta1, double theta2, Eigen::Index n, double K0 = 1.0);

using ParamMap = std::map<std::string, double>;

struct AnalyticOracle {
  std::string name;
  std::string closed_form;
  ParamMap defaults;
  /// Curves for the given parameters (defaults filled in for missing keys).
  std::function<std::vector<PolyCurved>(const ParamMap&)> generate;
  /// Reference quantities at time t.
  std::function<ParamMap(const ParamMap&, double t)> exact_value;
};

const std::vector<AnalyticOracle>& oracles();
const AnalyticOracle& find_oracle(const std::string& name);

}  // namespace csf::analytic
