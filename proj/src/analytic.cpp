#include "csflab/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "csflab/capacity.hpp"

namespace csf::analytic {
namespace {

constexpr double kPi = std::numbers::pi;

double param(const ParamMap& p, const ParamMap& defaults, const std::string& key) {
  if (auto it = p.find(key); it != p.end()) return it->second;
  return defaults.at(key);
}

Eigen::Index count(double v) {
  if (!(v >= 2.0) || v != std::floor(v)) throw InvalidArgument("vertex count must be an integer >= 2");
  return static_cast<Eigen::Index>(v);
}

}  // namespace

double circle_radius(double r0, double t) {
  if (!(r0 > 0.0)) throw InvalidArgument("circle_radius: r0 must be positive");
  const double r2 = r0 * r0 - 2.0 * t;
  if (!(r2 > 0.0)) {
    std::ostringstream os;
    os << "circle of radius " << r0 << " is extinct at t=" << t << " (extinction time " << 0.5 * r0 * r0 << ")";
    throw ExtinctionError(os.str());
  }
  return std::sqrt(r2);
}

double concentric_modulus(double r1, double r2) {
  if (!(r1 > 0.0 && r1 < r2)) throw InvalidArgument("concentric_modulus: need 0 < r1 < r2");
  return std::log(r2 / r1) / (2.0 * kPi);
}

PolyCurved grim_reaper(Eigen::Index n, double y_max) {
  if (n < 2) throw InvalidArgument("grim_reaper: n must be at least 2");
  if (!(y_max > 0.0 && y_max < 0.5 * kPi)) throw InvalidArgument("grim_reaper: need 0 < y_max < pi/2");
  Vertices2<double> v(2, n);
  const double denom = static_cast<double>(n - 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double y = y_max * (static_cast<double>(2 * k) - denom) / denom;
    v.col(k) << -std::log(std::cos(y)), y;
  }
  return PolyCurved(std::move(v), false);
}

PolyCurved grim_reaper_arclength(Eigen::Index n, double y_max) {
  if (n < 2) throw InvalidArgument("grim_reaper: n must be at least 2");
  if (!(y_max > 0.0 && y_max < 0.5 * kPi)) throw InvalidArgument("grim_reaper: need 0 < y_max < pi/2");
  const double s_max = std::asinh(std::tan(y_max));
  const double denom = static_cast<double>(n - 1);
  Vertices2<double> v(2, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double y = std::atan(std::sinh(s_max * (static_cast<double>(2 * k) - denom) / denom));
    if (k == 0) y = -y_max;
    if (k == n - 1) y = y_max;
    v.col(k) << -std::log(std::cos(y)), y;
  }
  return PolyCurved(std::move(v), false);
}

double grim_reaper_distance(const Eigen::Vector2d& p, double y_max, double shift) {
  auto dist2 = [&](double y) {
    const double dx = -std::log(std::cos(y)) + shift - p.x();
    const double dy = y - p.y();
    return dx * dx + dy * dy;
  };
  const double yc = std::clamp(p.y(), -y_max, y_max);
  const double d0 = std::sqrt(dist2(yc));
  // any closer curve point has |y - yc| < d0; the squared distance is unimodal there
  double lo = std::max(-y_max, yc - d0), hi = std::min(y_max, yc + d0);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = dist2(a), fb = dist2(b);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = dist2(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = dist2(b);
    }
  }
  return std::sqrt(std::min({d0 * d0, fa, fb, dist2(lo), dist2(hi)}));
}

double grim_reaper_translation_check(Eigen::Index n, double y_max, double tau, const FlowConfig& cfg) {
  if (!(tau >= 0.0)) throw InvalidArgument("grim_reaper_translation_check: tau must be non-negative");
  const AmbientSurface plane = AmbientSurface::plane();
  PolyCurved curve = grim_reaper_arclength(n, y_max);

  // Under purely normal motion a point of the soliton moves with dy/dt = -sin y cos y,
  // so tan y(t) = tan y(0) e^{-t}; the endpoints follow that exact trajectory.
  auto pin = [&](double t) {
    const double y = std::atan(std::tan(y_max) * std::exp(-t));
    curve.vertices.col(0) << -std::log(std::cos(y)) + t, -y;
    curve.vertices.col(n - 1) << -std::log(std::cos(y)) + t, y;
  };

  double t = 0.0;
  while (t < tau) {
    double dt = cfg.dt_safety * std::pow(min_edge_length(curve), 2) / 2.0;
    const bool last = t + dt >= tau;
    if (last) dt = tau - t;
    curve = advance_curve(curve, plane, dt);
    t = last ? tau : t + dt;
    pin(t);
    if (needs_resample(curve, cfg.resample_threshold)) curve = resample_uniform(curve, n);
    if (!curve.vertices.allFinite()) throw DegenerateFlowError("grim reaper flow diverged");
  }

  double worst = 0.0;
  for (Eigen::Index i = 0; i < curve.size(); ++i)
    worst = std::max(worst, grim_reaper_distance(curve.vertex(i), y_max, tau));
  return worst;
}

double sphere_latitude_angle(double theta0, double t, double K0) {
  if (!(theta0 > 0.0 && theta0 < kPi)) throw InvalidArgument("sphere_latitude_angle: theta0 must lie in (0, pi)");
  if (!(K0 > 0.0)) throw InvalidArgument("sphere_latitude_angle: K0 must be positive");
  const double c = std::cos(theta0) * std::exp(K0 * t);
  if (!(std::abs(c) < 1.0)) {
    std::ostringstream os;
    os << "latitude cap starting at theta=" << theta0 << " is extinct at t=" << t;
    throw ExtinctionError(os.str());
  }
  return std::acos(c);
}

double latitude_chart_radius(double theta, double K0) {
  if (!(theta > 0.0 && theta < kPi)) throw InvalidArgument("latitude_chart_radius: theta must lie in (0, pi)");
  return std::tan(0.5 * theta) / std::sqrt(K0);
}

MobiusImage mobius_transform(const NestedAnnulus& annulus, std::complex<double> a) {
  if (annulus.ambient.kind() != AmbientKind::EuclideanPlane)
    throw InvalidArgument("mobius_transform: planar annulus required");
  if (!(std::abs(a) < 1.0)) throw InvalidArgument("mobius_transform: need |a| < 1");
  const double r_max = std::max(annulus.inner.vertices.colwise().norm().maxCoeff(),
                                annulus.outer.vertices.colwise().norm().maxCoeff());
  const double s = 1.0 / (2.0 * r_max);
  auto map = [&](const PolyCurved& c) {
    PolyCurved out = c;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const std::complex<double> z(s * c.vertices(0, i), s * c.vertices(1, i));
      const std::complex<double> w = (z - a) / (1.0 - std::conj(a) * z);
      out.vertices.col(i) << w.real(), w.imag();
    }
    return out;
  };
  return {make_annulus(map(annulus.inner), map(annulus.outer), annulus.ambient), s};
}

PolyCurved circle(const Eigen::Vector2d& center, double radius, Eigen::Index n) {
  if (!(radius > 0.0)) throw InvalidArgument("circle: radius must be positive");
  if (n < 8) throw InvalidArgument("circle: n must be at least 8");
  Vertices2<double> v(2, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double th = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    v.col(k) << center.x() + radius * std::cos(th), center.y() + radius * std::sin(th);
  }
  return PolyCurved(std::move(v), true);
}

PolyCurved fourier_circle(const Eigen::Vector2d& center, double radius, const std::vector<FourierMode>& modes,
                          Eigen::Index n) {
  if (!(radius > 0.0)) throw InvalidArgument("fourier_circle: radius must be positive");
  if (n < 8) throw InvalidArgument("fourier_circle: n must be at least 8");
  auto point = [&](double s) {
    double r = 1.0;
    for (const auto& m : modes) r += m.amplitude * std::cos(2.0 * kPi * m.mode * s + m.phase);
    if (!(r > 0.0)) throw InvalidArgument("fourier_circle: amplitudes drive the radius negative");
    r *= radius;
    return Eigen::Vector2d(center.x() + r * std::cos(2.0 * kPi * s), center.y() + r * std::sin(2.0 * kPi * s));
  };

  // Arc-length table on a fine parameter grid, inverted by linear interpolation
  // of the parameter so every vertex lies exactly on the smooth curve.
  const Eigen::Index fine = 64 * n;
  std::vector<double> arc(fine + 1, 0.0);
  Eigen::Vector2d prev = point(0.0);
  for (Eigen::Index k = 1; k <= fine; ++k) {
    const Eigen::Vector2d cur = point(static_cast<double>(k) / static_cast<double>(fine));
    arc[k] = arc[k - 1] + (cur - prev).norm();
    prev = cur;
  }
  Vertices2<double> v(2, n);
  Eigen::Index j = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double target = arc[fine] * static_cast<double>(k) / static_cast<double>(n);
    while (j + 1 < fine && arc[j + 1] < target) ++j;
    const double frac = (target - arc[j]) / (arc[j + 1] - arc[j]);
    v.col(k) = point((static_cast<double>(j) + frac) / static_cast<double>(fine));
  }
  PolyCurved out(std::move(v), true);
  validate_curve(out);
  return out;
}

PolyCurved axial_circle(double x, double circumference, Eigen::Index n) {
  if (n < 8) throw InvalidArgument("axial_circle: n must be at least 8");
  Vertices2<double> v(2, n);
  for (Eigen::Index k = 0; k < n; ++k)
    v.col(k) << x, circumference * static_cast<double>(k) / static_cast<double>(n);
  return PolyCurved(std::move(v), true, circumference);
}

NestedAnnulus concentric_annulus(double r1, double r2, Eigen::Index n) {
  return make_annulus(circle({0.0, 0.0}, r1, n), circle({0.0, 0.0}, r2, n), AmbientSurface::plane());
}

NestedAnnulus cylinder_band(double x1, double x2, Eigen::Index n, double circumference) {
  return make_annulus(axial_circle(x1, circumference, n), axial_circle(x2, circumference, n),
                      AmbientSurface::cylinder(circumference));
}

NestedAnnulus latitude_annulus(double theta1, double theta2, Eigen::Index n, double K0) {
  return make_annulus(circle({0.0, 0.0}, latitude_chart_radius(theta1, K0), n),
                      circle({0.0, 0.0}, latitude_chart_radius(theta2, K0), n), AmbientSurface::sphere(K0));
}

const std::vector<AnalyticOracle>& oracles() {
  static const std::vector<AnalyticOracle> registry = [] {
    std::vector<AnalyticOracle> r;

    {
      AnalyticOracle o;
      o.name = "shrinking_circle";
      o.closed_form = "planar circle, r(t) = sqrt(r0^2 - 2t), extinct at t = r0^2/2";
      o.defaults = {{"radius", 1.0}, {"n", 256}};
      const ParamMap d = o.defaults;
      o.generate = [d](const ParamMap& p) {
        return std::vector<PolyCurved>{circle({0.0, 0.0}, param(p, d, "radius"), count(param(p, d, "n")))};
      };
      o.exact_value = [d](const ParamMap& p, double t) {
        return ParamMap{{"radius", circle_radius(param(p, d, "radius"), t)}};
      };
      r.push_back(o);
    }
    {
      AnalyticOracle o;
      o.name = "grim_reaper";
      o.closed_form = "x = -log cos y + t, |y| < pi/2: translates at unit speed in x";
      o.defaults = {{"n", 129}, {"y_max", 1.4}};
      const ParamMap d = o.defaults;
      o.generate = [d](const ParamMap& p) {
        return std::vector<PolyCurved>{grim_reaper(count(param(p, d, "n")), param(p, d, "y_max"))};
      };
      o.exact_value = [](const ParamMap&, double t) { return ParamMap{{"x_shift", t}, {"apex_curvature", 1.0}}; };
      r.push_back(o);
    }
    {
      AnalyticOracle o;
      o.name = "concentric_annulus";
      o.closed_form = "h(t) = log(r2(t)/r1(t)) / (2 pi) with r_i(t) = sqrt(r_i^2 - 2t)";
      o.defaults = {{"r1", 1.0}, {"r2", 2.0}, {"n", 256}};
      const ParamMap d = o.defaults;
      o.generate = [d](const ParamMap& p) {
        const auto a = concentric_annulus(param(p, d, "r1"), param(p, d, "r2"), count(param(p, d, "n")));
        return std::vector<PolyCurved>{a.inner, a.outer};
      };
      o.exact_value = [d](const ParamMap& p, double t) {
        const double r1 = circle_radius(param(p, d, "r1"), t);
        const double r2 = circle_radius(param(p, d, "r2"), t);
        return ParamMap{{"r1", r1}, {"r2", r2}, {"modulus", concentric_modulus(r1, r2)}};
      };
      r.push_back(o);
    }
    {
      AnalyticOracle o;
      o.name = "sphere_latitude";
      o.closed_form = "cos theta(t) = cos theta0 * exp(K0 t); chart radius tan(theta/2)/sqrt(K0)";
      o.defaults = {{"theta", 1.0}, {"K0", 1.0}, {"n", 256}};
      const ParamMap d = o.defaults;
      o.generate = [d](const ParamMap& p) {
        const double rc = latitude_chart_radius(param(p, d, "theta"), param(p, d, "K0"));
        return std::vector<PolyCurved>{circle({0.0, 0.0}, rc, count(param(p, d, "n")))};
      };
      o.exact_value = [d](const ParamMap& p, double t) {
        const double K0 = param(p, d, "K0");
        const double th = sphere_latitude_angle(param(p, d, "theta"), t, K0);
        return ParamMap{{"theta", th}, {"chart_radius", latitude_chart_radius(th, K0)}};
      };
      r.push_back(o);
    }
    {
      AnalyticOracle o;
      o.name = "mobius_annulus";
      o.closed_form = "image of r1 < |z| < r2 under a disc automorphism; modulus log(r2/r1)/(2 pi)";
      o.defaults = {{"r1", 1.0}, {"r2", 2.0}, {"a_re", 0.3}, {"a_im", 0.0}, {"n", 256}};
      const ParamMap d = o.defaults;
      o.generate = [d](const ParamMap& p) {
        const auto base = concentric_annulus(param(p, d, "r1"), param(p, d, "r2"), count(param(p, d, "n")));
        const auto img = mobius_transform(base, {param(p, d, "a_re"), param(p, d, "a_im")});
        return std::vector<PolyCurved>{img.annulus.inner, img.annulus.outer};
      };
      o.exact_value = [d](const ParamMap& p, double) {
        return ParamMap{{"modulus", concentric_modulus(param(p, d, "r1"), param(p, d, "r2"))}};
      };
      r.push_back(o);
    }
    return r;
  }();
  return registry;
}

const AnalyticOracle& find_oracle(const std::string& name) {
  for (const auto& o : oracles())
    if (o.name == name) return o;
  throw InvalidArgument("unknown oracle '" + name + "'");
}

}  // namespace csf::analytic
