#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csflab/harness.hpp"

namespace csf {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

/// Subpaths of a curve in chart coordinates; periodic curves are cut where they
/// cross the seam of the fundamental domain [0, period).
std::vector<std::vector<Eigen::Vector2d>> pieces(const PolyCurved& c) {
  std::vector<std::vector<Eigen::Vector2d>> out(1);
  const Eigen::Index n = c.size();
  if (!c.periodic()) {
    for (Eigen::Index i = 0; i < n; ++i) out[0].push_back(c.vertex(i));
    return out;
  }
  const double P = c.period;
  Eigen::Vector2d p = c.vertex(0);
  p.y() -= P * std::floor(p.y() / P);
  out[0].push_back(p);
  for (Eigen::Index i = 0; i < c.edge_count(); ++i) {
    Eigen::Vector2d q = p + c.edge(i);
    const double wrap = std::floor(q.y() / P);
    if (wrap != 0.0) {
      const double seam = wrap > 0.0 ? P : 0.0;
      const double s = (seam - p.y()) / (q.y() - p.y());
      const Eigen::Vector2d cut = p + s * (q - p);
      out.back().push_back(cut);
      out.emplace_back();
      out.back().push_back({cut.x(), cut.y() - wrap * P});
      q.y() -= wrap * P;
    }
    out.back().push_back(q);
    p = q;
  }
  return out;
}

}  // namespace

std::string svg_document(const FlowState& state) {
  const NestedAnnulus& a = state.annulus;
  const auto inner = pieces(a.inner), outer = pieces(a.outer);
  const double P = a.ambient.period();

  Eigen::Vector2d lo = Eigen::Vector2d::Constant(INFINITY), hi = -lo;
  for (const auto* set : {&inner, &outer})
    for (const auto& piece : *set)
      for (const auto& p : piece) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
  if (P > 0.0) lo.y() = 0.0, hi.y() = P;
  const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
  const double margin = 0.05 * extent;
  lo.array() -= margin;
  hi.array() += margin;
  const Eigen::Vector2d size = hi - lo;
  const double width = 800.0, height = width * size.y() / size.x();

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
     << "\" viewBox=\"" << fmt(lo.x()) << ' ' << fmt(-hi.y()) << ' ' << fmt(size.x()) << ' ' << fmt(size.y())
     << "\">\n"
     << "<style>path{fill:none;stroke-width:1.5;vector-effect:non-scaling-stroke}"
        ".inner{stroke:#c0392b}.outer{stroke:#2c3e50}.period{stroke:#999;stroke-dasharray:6 4}</style>\n"
     << "<title>t=" << fmt(state.t) << " step=" << state.step_count << " " << to_string(a.ambient.kind())
     << "</title>\n";
  if (P > 0.0)
    for (double y : {0.0, P})
      os << "<path class=\"period\" d=\"M" << fmt(lo.x()) << ',' << fmt(-y) << " L" << fmt(hi.x()) << ','
         << fmt(-y) << "\"/>\n";
  auto path = [&](const char* cls, const std::vector<std::vector<Eigen::Vector2d>>& set, bool close) {
    os << "<path class=\"" << cls << "\" d=\"";
    bool first_piece = true;
    for (const auto& piece : set) {
      if (!first_piece) os << ' ';
      first_piece = false;
      for (std::size_t k = 0; k < piece.size(); ++k)
        os << (k == 0 ? "M" : " L") << fmt(piece[k].x()) << ',' << fmt(-piece[k].y());
    }
    if (close) os << " Z";
    os << "\"/>\n";
  };
  path("inner", inner, !a.inner.periodic());
  path("outer", outer, !a.outer.periodic());
  os << "</svg>\n";
  return os.str();
}

void emit_svg(const FlowState& state, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  try {
    if (!parent.empty()) std::filesystem::create_directories(parent);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(e.what());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path + "'");
  os << svg_document(state);
  if (!os) throw IoError("write failed for '" + path + "'");
}

}  // namespace csf
