#pragma once

// Experiment configuration, orchestration, output files and the built-in
// verification suite.

#include <iosfwd>
#include <string>
#include <vector>

#include "csflab/analytic.hpp"
#include "csflab/capacity.hpp"
#include "csflab/flow.hpp"

namespace csf {

struct AmbientSpec {
  AmbientKind kind = AmbientKind::EuclideanPlane;
  double K0 = 0.0;             // sphere / hyperbolic only
  double circumference = 1.0;  // cylinder only
};

AmbientSurface make_ambient(const AmbientSpec& spec);

enum class CurveKind { Circle, FourierCircle, File, AxialCircle };

struct CurveSpec {
  CurveKind kind = CurveKind::Circle;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
  std::vector<analytic::FourierMode> modes;
  std::string path;  // File; relative paths resolve against the config file's directory
  double x = 0.0;    // AxialCircle
};

struct ExperimentConfig {
  AmbientSpec ambient;
  CurveSpec inner;
  CurveSpec outer;
  Eigen::Index n_vertices = 256;
  FlowConfig flow;  // flow.n_vertices mirrors n_vertices
  SolverParams solver;
  int modulus_every = 10;
  std::string output_dir;  // empty: no files written
  bool emit_svg = false;
  int svg_every = 100;
  std::string base_dir = ".";

  void validate() const;
};

/// Parses a flat JSON object whose keys are the ExperimentConfig field names
/// (flow and solver fields at top level). Unknown keys are an error. Curves are
/// generated and validated, so a config that loads can be run.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON of the config (sorted keys); input to config_hash.
std::string config_to_json(const ExperimentConfig& cfg);
/// 64-bit FNV-1a of config_to_json with output_dir cleared, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

PolyCurved build_curve(const CurveSpec& spec, Eigen::Index n, const AmbientSpec& ambient, const std::string& base_dir);
NestedAnnulus build_annulus(const ExperimentConfig& cfg);

/// Solves the modulus at each trace record whose step count is a multiple of
/// modulus_every (and at the first and final records). A solver-accuracy
/// failure is retried once with doubled sources, then recorded as NaN.
/// Flow failures truncate the trace and are recorded in its metadata rather than
/// thrown. With a non-empty output_dir writes trace.csv, diagnostics.csv,
/// metadata.json and optional SVG frames.
FlowTrace run_experiment(const ExperimentConfig& cfg);

/// Standalone SVG of both curves; cylinder states are drawn in the unrolled
/// fundamental domain with dashed period guides. Creates parent directories.
void emit_svg(const FlowState& state, const std::string& path);
std::string svg_document(const FlowState& state);

std::string capacity_solution_json(const CapacitySolution& sol);

struct CriterionResult {
  std::string id;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string expected;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CriterionResult> results;
  std::vector<std::string> warnings;
  bool all_passed() const;
};

std::string format_result(const CriterionResult& r);

/// Runs every acceptance criterion whose id equals the filter or whose name
/// contains it (case-insensitive); an empty filter runs all. When `progress`
/// is given each line is printed as soon as the criterion finishes.
VerifyReport verify(const std::string& filter, std::ostream* progress = nullptr);

}  // namespace csf
