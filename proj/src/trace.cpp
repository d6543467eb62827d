#include "csflab/trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csflab/errors.hpp"

namespace csf {

void fill_log_rate(FlowTrace& trace) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    trace.records[i].dlogh_dt = kNaN;
    const double h = trace.records[i].h;
    if (std::isfinite(h) && h > 0.0) idx.push_back(i);
  }
  // records sharing a time stamp (t_end = 0) give no rate
  auto rate = [&](std::size_t a, std::size_t b) {
    const auto& ra = trace.records[a];
    const auto& rb = trace.records[b];
    const double dt = rb.t - ra.t;
    return dt > 0.0 ? (std::log(rb.h) - std::log(ra.h)) / dt : kNaN;
  };
  if (idx.size() < 2) return;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t lo = idx[k == 0 ? 0 : k - 1];
    const std::size_t hi = idx[k + 1 == idx.size() ? k : k + 1];
    trace.records[idx[k]].dlogh_dt = rate(lo, hi);
  }
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace) {
  os << kTraceHeader << '\n';
  char buf[64];
  for (const auto& r : trace.records) {
    const double cols[] = {r.t,         r.h,         r.E,       r.area_inner, r.area_outer, r.area_annulus,
                           r.len_inner, r.len_outer, r.min_sep, r.dlogh_dt,   r.K0};
    bool first = true;
    for (double v : cols) {
      if (!first) os << ',';
      first = false;
      if (std::isnan(v)) {
        os << "nan";
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
      }
    }
    os << '\n';
  }
}

void write_trace_csv(const std::string& path, const FlowTrace& trace) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path);
  if (!os) throw IoError("cannot write trace file " + path);
  write_trace_csv(os, trace);
}

FlowTrace read_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open trace file " + path);
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) throw IoError("trace csv: unexpected header in " + path);
  FlowTrace trace;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[11];
    int n = 0;
    while (n < 11 && std::getline(ss, cell, ',')) v[n++] = std::strtod(cell.c_str(), nullptr);
    if (n != 11) throw IoError("trace csv: short row in " + path);
    trace.records.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]});
  }
  return trace;
}

}  // namespace csf
