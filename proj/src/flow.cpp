#include "csflab/flow.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace csf {
namespace {

double extent(const PolyCurved& c) {
  const Vertices2<double> walk = unwrapped_walk(c);
  return (walk.rowwise().maxCoeff() - walk.rowwise().minCoeff()).norm();
}

double max_inverse_metric(const PolyCurved& c, const AmbientSurface& ambient) {
  if (ambient.is_flat()) return 1.0;
  double m = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    m = std::max(m, std::exp(-2.0 * ambient.conformal_factor(c.vertex(i))));
  return m;
}

std::string at_time(const char* what, double t) {
  std::ostringstream os;
  os << what << " at t=" << t;
  return os.str();
}

// Moves both curves by dt along the given velocities and checks the result; the
// incoming state is trusted. `sep` receives the separation of the new state.
FlowState advance_state(const FlowState& s, const FlowConfig& cfg, double dt, const Vertices2<double>& v_inner,
                        const Vertices2<double>& v_outer, double& sep) {
  const AmbientSurface& ambient = s.annulus.ambient;
  PolyCurved inner = s.annulus.inner;
  PolyCurved outer = s.annulus.outer;
  inner.vertices += dt * v_inner;
  outer.vertices += dt * v_outer;
  const double t_new = s.t + dt;

  for (PolyCurved* c : {&inner, &outer}) {
    if (!c->vertices.allFinite()) throw DegenerateFlowError(at_time("non-finite vertex", t_new));
    if (extent(*c) < cfg.min_sep_floor)
      throw AnnulusCollapseError(at_time("boundary curve shrank to a point", t_new));
  }
  sep = min_separation(inner, outer);
  if (sep < cfg.min_sep_floor) {
    std::ostringstream os;
    os << "boundary curves within " << sep << " (floor " << cfg.min_sep_floor << ") at t=" << t_new;
    throw AnnulusCollapseError(os.str());
  }

  bool resampled = false;
  for (PolyCurved* c : {&inner, &outer}) {
    if (needs_resample(*c, cfg.resample_threshold)) {
      *c = resample_uniform(*c, cfg.n_vertices);
      resampled = true;
    }
    if (!is_simple(*c)) throw DegenerateFlowError(at_time("boundary curve self-intersected", t_new));
    for (Eigen::Index i = 0; i < c->size(); ++i)
      if (!ambient.in_domain(c->vertex(i))) throw DegenerateFlowError(at_time("curve left the chart", t_new));
  }
  if (resampled) sep = min_separation(inner, outer);
  if (!contains(outer, Eigen::Vector2d(inner.vertex(0))))
    throw DegenerateFlowError(at_time("inner curve escaped the outer curve", t_new));

  FlowState next;
  next.t = t_new;
  next.annulus = NestedAnnulus{std::move(inner), std::move(outer), ambient};
  next.dt_last = dt;
  next.step_count = s.step_count + 1;
  return next;
}

double bounded_dt(const NestedAnnulus& a, const FlowConfig& cfg, const Vertices2<double>& v_inner,
                  const Vertices2<double>& v_outer, double sep) {
  const double l_min = std::min(min_edge_length(a.inner), min_edge_length(a.outer));
  const double metric = std::max(max_inverse_metric(a.inner, a.ambient), max_inverse_metric(a.outer, a.ambient));
  double dt = cfg.dt_safety * l_min * l_min / (2.0 * metric);
  const double v_max = std::max(v_inner.colwise().norm().maxCoeff(), v_outer.colwise().norm().maxCoeff());
  if (v_max > 0.0) dt = std::min(dt, sep / (4.0 * v_max));
  return dt;
}

void require_valid_state(const FlowState& state) {
  try {
    validate_annulus(state.annulus);
  } catch (const std::exception& e) {
    throw DegenerateFlowError(std::string("invalid flow state: ") + e.what());
  }
}

}  // namespace

void FlowConfig::validate() const {
  if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be non-negative");
  if (!(dt_safety > 0.0 && dt_safety < 0.5)) throw InvalidArgument("dt_safety must lie in (0, 0.5)");
  if (!(resample_threshold > 1.0)) throw InvalidArgument("resample_threshold must exceed 1");
  if (n_vertices < 8) throw InvalidArgument("n_vertices must be at least 8");
  if (!(min_sep_floor > 0.0)) throw InvalidArgument("min_sep_floor must be positive");
  if (record_every < 1) throw InvalidArgument("record_every must be positive");
}

Vertices2<double> csf_velocity(const PolyCurved& curve, const AmbientSurface& ambient) {
  const Eigen::Index n = curve.size();
  Vertices2<double> v = Vertices2<double>::Zero(2, n);
  const Vertices2<double> k = discrete_curvature(curve);
  const Vertices2<double> nu = ambient.is_flat() ? Vertices2<double>() : vertex_normals(curve);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d p = curve.vertex(i);
    ambient.require_in_domain(p);
    if (!curve.closed && (i == 0 || i == n - 1)) continue;
    if (ambient.is_flat()) {
      v.col(i) = k.col(i);
    } else {
      const Eigen::Vector2d g = ambient.conformal_gradient(p);
      const Eigen::Vector2d ni = nu.col(i);
      v.col(i) = std::exp(-2.0 * ambient.conformal_factor(p)) * (k.col(i) - g.dot(ni) * ni);
    }
  }
  return v;
}

Eigen::VectorXd csf_normal_speed(const NestedAnnulus& annulus, bool outer) {
  const PolyCurved& c = outer ? annulus.outer : annulus.inner;
  const Vertices2<double> v = csf_velocity(c, annulus.ambient);
  const Vertices2<double> nu = annulus_normals(annulus, outer);
  return v.cwiseProduct(nu).colwise().sum().transpose();
}

double stable_dt(const NestedAnnulus& a, const FlowConfig& cfg) {
  return bounded_dt(a, cfg, csf_velocity(a.inner, a.ambient), csf_velocity(a.outer, a.ambient),
                    min_separation(a.inner, a.outer));
}

PolyCurved advance_curve(const PolyCurved& curve, const AmbientSurface& ambient, double dt) {
  PolyCurved next = curve;
  next.vertices += dt * csf_velocity(curve, ambient);
  return next;
}

bool needs_resample(const PolyCurved& curve, double threshold) {
  return max_edge_length(curve) > threshold * min_edge_length(curve);
}

FlowState csf_step(const FlowState& state, const FlowConfig& cfg) {
  require_valid_state(state);
  const NestedAnnulus& a = state.annulus;
  const Vertices2<double> vi = csf_velocity(a.inner, a.ambient), vo = csf_velocity(a.outer, a.ambient);
  double sep = min_separation(a.inner, a.outer);
  return advance_state(state, cfg, bounded_dt(a, cfg, vi, vo, sep), vi, vo, sep);
}

FlowState csf_step(const FlowState& state, const FlowConfig& cfg, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("csf_step: dt must be positive");
  require_valid_state(state);
  const NestedAnnulus& a = state.annulus;
  double sep = 0.0;
  return advance_state(state, cfg, dt, csf_velocity(a.inner, a.ambient), csf_velocity(a.outer, a.ambient), sep);
}

TraceRecord make_record(const FlowState& s) {
  TraceRecord r;
  r.t = s.t;
  r.area_inner = enclosed_area(s.annulus.inner);
  r.area_outer = enclosed_area(s.annulus.outer);
  r.area_annulus = r.area_outer - r.area_inner;
  r.len_inner = curve_length(s.annulus.inner);
  r.len_outer = curve_length(s.annulus.outer);
  r.min_sep = min_separation(s.annulus.inner, s.annulus.outer);
  r.K0 = s.annulus.ambient.K0();
  return r;
}

FlowTrace csf_run(const NestedAnnulus& initial, const FlowConfig& cfg, const FlowRecorder& recorder) {
  cfg.validate();
  validate_annulus(initial);

  FlowTrace trace;
  FlowState state;
  state.annulus = initial;
  auto record = [&] {
    TraceRecord r = make_record(state);
    if (recorder) recorder(state, r);
    trace.records.push_back(r);
  };

  record();
  double sep = min_separation(initial.inner, initial.outer);
  try {
    while (state.t < cfg.t_end) {
      const NestedAnnulus& a = state.annulus;
      const Vertices2<double> vi = csf_velocity(a.inner, a.ambient), vo = csf_velocity(a.outer, a.ambient);
      double dt = bounded_dt(a, cfg, vi, vo, sep);
      if (!(dt > 0.0)) throw AnnulusCollapseError(at_time("time step underflow", state.t));
      const bool last = state.t + dt >= cfg.t_end;
      if (last) dt = cfg.t_end - state.t;
      state = advance_state(state, cfg, dt, vi, vo, sep);
      if (last) state.t = cfg.t_end;
      if (last || state.step_count % cfg.record_every == 0) record();
    }
  } catch (FlowError& e) {
    trace.metadata.failure = e.what();
    trace.metadata.failure_time = state.t;
    e.time = state.t;
    e.partial_trace = std::make_shared<FlowTrace>(trace);
    throw;
  }
  if (cfg.t_end <= 0.0) trace.records.push_back(trace.records.front());
  return trace;
}

}  // namespace csf
