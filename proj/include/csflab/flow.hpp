#pragma once

#include <functional>

#include "csflab/annulus.hpp"
#include "csflab/trace.hpp"

namespace csf {

struct FlowConfig {
  double t_end = 0.0;
  double dt_safety = 0.4;
  double resample_threshold = 2.0;  // max/min edge-length ratio
  Eigen::Index n_vertices = 256;
  double min_sep_floor = 1e-3;
  int record_every = 10;

  void validate() const;
};

struct FlowState {
  double t = 0.0;
  NestedAnnulus annulus;
  double dt_last = 0.0;
  long step_count = 0;
};

/// Chart velocity of curve shortening flow at each vertex.
///
/// For a metric e^{2 phi}|dx|^2 the geodesic curvature vector in chart
/// coordinates is V = e^{-2 phi} (k - (grad phi . n) n), with k the Euclidean
/// discrete curvature vector and n the Euclidean unit normal. On flat charts
/// this is exactly k. Open-curve endpoints get zero velocity.
Vertices2<double> csf_velocity(const PolyCurved& curve, const AmbientSurface& ambient);

/// Normal speed along the annulus-outward normal at each vertex of one boundary curve.
Eigen::VectorXd csf_normal_speed(const NestedAnnulus& annulus, bool outer);

/// Explicit step bound: dt_safety * l_min^2 / (2 * max e^{-2 phi}), capped so no
/// vertex moves farther than a quarter of the current curve separation.
double stable_dt(const NestedAnnulus& annulus, const FlowConfig& cfg);

/// Forward-Euler update of a single curve, without validation or resampling.
PolyCurved advance_curve(const PolyCurved& curve, const AmbientSurface& ambient, double dt);

/// True when the max/min edge-length ratio exceeds the threshold.
bool needs_resample(const PolyCurved& curve, double threshold);

/// One step with dt = stable_dt. Throws DegenerateFlowError for an invalid
/// incoming state or a self-intersection, AnnulusCollapseError when the curves
/// come within min_sep_floor or a curve shrinks below it.
FlowState csf_step(const FlowState& state, const FlowConfig& cfg);
FlowState csf_step(const FlowState& state, const FlowConfig& cfg, double dt);

using FlowRecorder = std::function<void(const FlowState&, TraceRecord&)>;

/// Base trace record for a state: areas, lengths, separation; modulus columns NaN.
TraceRecord make_record(const FlowState& state);

/// Steps until t_end, recording every cfg.record_every steps and at the final
/// state. Flow errors are rethrown with the failure time and partial trace attached.
FlowTrace csf_run(const NestedAnnulus& initial, const FlowConfig& cfg, const FlowRecorder& recorder = {});

}  // namespace csf
