#include "csflab/curve_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace csf {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, int line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == text.c_str() || (end && *end != '\0') || errno == ERANGE)
    throw IoError("curve csv line " + std::to_string(line_no) + ": bad number '" + text + "'");
  return v;
}

}  // namespace

void write_curve_csv(std::ostream& os, const PolyCurved& curve) {
  os << "# closed=" << (curve.closed ? "true" : "false") << '\n';
  for (Eigen::Index i = 0; i < curve.size(); ++i)
    os << format_double(curve.vertices(0, i)) << ',' << format_double(curve.vertices(1, i)) << '\n';
}

void write_curve_csv(const std::string& path, const PolyCurved& curve) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path);
  if (!os) throw IoError("cannot write curve file " + path);
  write_curve_csv(os, curve);
  if (!os) throw IoError("error writing curve file " + path);
}

PolyCurved read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("curve csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool closed;
  if (line == "# closed=true") {
    closed = true;
  } else if (line == "# closed=false") {
    closed = false;
  } else {
    throw IoError("curve csv: expected '# closed=true|false' header, got '" + line + "'");
  }

  std::vector<double> xs, ys;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError("curve csv line " + std::to_string(line_no) + ": expected 'x,y'");
    xs.push_back(parse_double(line.substr(0, comma), line_no));
    ys.push_back(parse_double(line.substr(comma + 1), line_no));
  }
  Vertices2<double> v(2, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v.col(static_cast<Eigen::Index>(i)) << xs[i], ys[i];
  return PolyCurved(std::move(v), closed);
}

PolyCurved read_curve_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open curve file " + path);
  return read_curve_csv(is);
}

}  // namespace csf
