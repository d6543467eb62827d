#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace csf {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TraceRecord {
  double t = 0.0;
  double h = kNaN;
  double E = kNaN;
  double area_inner = kNaN;
  double area_outer = kNaN;
  double area_annulus = kNaN;
  double len_inner = kNaN;
  double len_outer = kNaN;
  double min_sep = kNaN;
  double dlogh_dt = kNaN;
  double K0 = kNaN;
};

struct TraceMetadata {
  std::string config_hash;
  double max_boundary_residual = kNaN;
  int modulus_solves = 0;
  int failed_solves = 0;
  int retried_solves = 0;
  std::optional<std::string> failure;  // set when the flow stopped early
  double failure_time = kNaN;
};

struct FlowTrace {
  std::vector<TraceRecord> records;
  TraceMetadata metadata;
};

inline constexpr const char* kTraceHeader =
    "t,h,E,area_inner,area_outer,area_annulus,len_inner,len_outer,min_sep,dlogh_dt,K0";

/// Centered differences of log h over adjacent records with finite h; one-sided at the ends.
void fill_log_rate(FlowTrace& trace);

void write_trace_csv(std::ostream& os, const FlowTrace& trace);
void write_trace_csv(const std::string& path, const FlowTrace& trace);
FlowTrace read_trace_csv(const std::string& path);

}  // namespace csf
