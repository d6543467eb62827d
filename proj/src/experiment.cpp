#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "csflab/harness.hpp"
#include "json.hpp"

namespace csf {
namespace {

using nlohmann::json;

struct Diagnostic {
  double dE_dt = kNaN;
  double residual = kNaN;
  int sources = 0;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_diagnostics(const std::string& path, const FlowTrace& trace, const std::vector<Diagnostic>& diag) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path + "'");
  os << "t,h,E,dE_dt_boundary,dlogh_dt_boundary,boundary_residual,sources\n";
  char buf[64];
  auto put = [&](double v) {
    if (std::isnan(v)) {
      os << "nan";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
    }
  };
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& r = trace.records[i];
    const Diagnostic& d = diag[i];
    put(r.t), os << ',', put(r.h), os << ',', put(r.E), os << ',', put(d.dE_dt), os << ',';
    put(-d.dE_dt / r.E), os << ',', put(d.residual), os << ',' << d.sources << '\n';
  }
}

void write_metadata(const std::string& path, const ExperimentConfig& cfg, const FlowTrace& trace) {
  const TraceMetadata& m = trace.metadata;
  json j;
  j["config_hash"] = m.config_hash;
  j["config"] = json::parse(config_to_json(cfg));
  j["max_boundary_residual"] = number_or_null(m.max_boundary_residual);
  j["modulus_solves"] = m.modulus_solves;
  j["failed_solves"] = m.failed_solves;
  j["retried_solves"] = m.retried_solves;
  j["records"] = trace.records.size();
  j["failure"] = m.failure ? json(*m.failure) : json(nullptr);
  j["failure_time"] = number_or_null(m.failure_time);
  const bool fourier = cfg.inner.kind == CurveKind::FourierCircle || cfg.outer.kind == CurveKind::FourierCircle;
  j["curve_family"] = fourier ? "fourier_circle (generic test family)" : "explicit";
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path + "'");
  os << j.dump(2) << '\n';
}

std::string frame_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%08ld.svg", step);
  return buf;
}

}  // namespace

FlowTrace run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  FlowConfig flow = cfg.flow;
  flow.n_vertices = cfg.n_vertices;
  const NestedAnnulus initial = build_annulus(cfg);
  const std::filesystem::path out(cfg.output_dir);
  const bool write = !cfg.output_dir.empty();
  if (write) std::filesystem::create_directories(out);

  TraceMetadata meta;
  meta.config_hash = config_hash(cfg);
  meta.max_boundary_residual = 0.0;
  std::vector<Diagnostic> diag;

  auto solve = [&](const NestedAnnulus& a, Diagnostic& d) -> std::optional<CapacitySolution> {
    SolverParams p = cfg.solver;
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        CapacitySolution sol = solve_capacity_mfs(a, p);
        d.sources = p.n_sources_per_boundary;
        return sol;
      } catch (const SolverAccuracyError&) {
        if (attempt == 0) ++meta.retried_solves;
        p.n_sources_per_boundary *= 2;
      }
    }
    ++meta.failed_solves;
    return std::nullopt;
  };

  const FlowRecorder recorder = [&](const FlowState& s, TraceRecord& r) {
    Diagnostic d;
    const bool first = s.step_count == 0;
    const bool final = s.t >= flow.t_end;
    if (first || final || s.step_count % cfg.modulus_every == 0) {
      ++meta.modulus_solves;
      if (auto sol = solve(s.annulus, d)) {
        r.h = sol->h;
        r.E = sol->E;
        d.residual = sol->boundary_residual;
        meta.max_boundary_residual = std::max(meta.max_boundary_residual, sol->boundary_residual);
        try {
          d.dE_dt = energy_variation_rhs(s.annulus, *sol, csf_normal_speed(s.annulus, false),
                                         csf_normal_speed(s.annulus, true))
                        .dE_dt;
        } catch (const EvaluationError&) {
        }
      }
    }
    if (write && cfg.emit_svg && (first || final || s.step_count % cfg.svg_every == 0))
      emit_svg(s, (out / frame_name(s.step_count)).string());
    diag.push_back(d);
  };

  FlowTrace trace;
  try {
    trace = csf_run(initial, flow, recorder);
  } catch (const FlowError& e) {
    if (e.partial_trace) trace = *e.partial_trace;
    trace.metadata.failure = e.what();
    trace.metadata.failure_time = e.time;
  }
  // the zero-length run duplicates its single record
  while (diag.size() < trace.records.size()) diag.push_back(diag.back());

  meta.failure = trace.metadata.failure;
  meta.failure_time = trace.metadata.failure_time;
  if (meta.modulus_solves == meta.failed_solves) meta.max_boundary_residual = kNaN;
  trace.metadata = meta;
  fill_log_rate(trace);

  if (write) {
    write_trace_csv((out / "trace.csv").string(), trace);
    write_diagnostics((out / "diagnostics.csv").string(), trace, diag);
    write_metadata((out / "metadata.json").string(), cfg, trace);
  }
  return trace;
}

std::string capacity_solution_json(const CapacitySolution& sol) {
  auto points = [](const Vertices2<double>& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.cols(); ++k) a.push_back({v(0, k), v(1, k)});
    return a;
  };
  auto values = [](const Eigen::VectorXd& v) {
    json a = json::array();
    for (double x : v) a.push_back(number_or_null(x));
    return a;
  };
  json j;
  j["source_points"] = {{"inner", points(sol.source_points.inner)}, {"outer", points(sol.source_points.outer)}};
  j["coefficients"] = {{"inner", values(sol.coefficients.inner)},
                       {"outer", values(sol.coefficients.outer)},
                       {"constant", number_or_null(sol.coefficients.constant)}};
  j["E"] = number_or_null(sol.E);
  j["h"] = number_or_null(sol.h);
  j["boundary_residual"] = number_or_null(sol.boundary_residual);
  j["flux"] = number_or_null(sol.flux);
  j["chart"] = {{"map", sol.chart.exponential ? "exp" : "identity"},
                {"circumference", sol.chart.circumference},
                {"axial_shift", sol.chart.axial_shift}};
  return j.dump(2);
}

}  // namespace csf
