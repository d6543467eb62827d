#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "csflab/curve_io.hpp"
#include "csflab/harness.hpp"
#include "json.hpp"

namespace csf {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidArgument(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
}

double get_number(const json& obj, const std::string& key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw InvalidArgument(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

long get_integer(const json& obj, const std::string& key, long fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw InvalidArgument(where + "." + key + " must be an integer");
  return obj[key].get<long>();
}

Eigen::Vector2d get_point(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) return Eigen::Vector2d::Zero();
  const json& p = obj[key];
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
    throw InvalidArgument(where + "." + key + " must be [x, y]");
  return {p[0].get<double>(), p[1].get<double>()};
}

CurveSpec parse_curve(const json& obj, const std::string& where) {
  if (!obj.is_object() || !obj.contains("type") || !obj["type"].is_string())
    throw InvalidArgument(where + " needs a string 'type'");
  const std::string type = obj["type"].get<std::string>();
  CurveSpec c;
  if (type == "circle") {
    check_keys(obj, {"type", "center", "radius"}, where);
    c.kind = CurveKind::Circle;
    c.center = get_point(obj, "center", where);
    c.radius = get_number(obj, "radius", kNaN, where);
  } else if (type == "fourier_circle") {
    check_keys(obj, {"type", "center", "radius", "modes"}, where);
    c.kind = CurveKind::FourierCircle;
    c.center = get_point(obj, "center", where);
    c.radius = get_number(obj, "radius", kNaN, where);
    if (obj.contains("modes")) {
      if (!obj["modes"].is_array()) throw InvalidArgument(where + ".modes must be an array");
      for (const json& m : obj["modes"]) {
        const std::string mw = where + ".modes[]";
        check_keys(m, {"mode", "amplitude", "phase"}, mw);
        c.modes.push_back({static_cast<int>(get_integer(m, "mode", 0, mw)), get_number(m, "amplitude", 0.0, mw),
                           get_number(m, "phase", 0.0, mw)});
        if (c.modes.back().mode < 1) throw InvalidArgument(mw + ".mode must be a positive integer");
      }
    }
  } else if (type == "file") {
    check_keys(obj, {"type", "path"}, where);
    c.kind = CurveKind::File;
    if (!obj.contains("path") || !obj["path"].is_string()) throw InvalidArgument(where + ".path must be a string");
    c.path = obj["path"].get<std::string>();
  } else if (type == "axial_circle") {
    check_keys(obj, {"type", "x"}, where);
    c.kind = CurveKind::AxialCircle;
    c.x = get_number(obj, "x", kNaN, where);
  } else {
    throw InvalidArgument(where + ": unknown curve type '" + type + "'");
  }
  if ((c.kind == CurveKind::Circle || c.kind == CurveKind::FourierCircle) && !(c.radius > 0.0))
    throw InvalidArgument(where + ".radius must be a positive number");
  if (c.kind == CurveKind::AxialCircle && !std::isfinite(c.x)) throw InvalidArgument(where + ".x is required");
  return c;
}

json curve_json(const CurveSpec& c) {
  json j;
  switch (c.kind) {
    case CurveKind::Circle:
      j = {{"type", "circle"}, {"center", {c.center.x(), c.center.y()}}, {"radius", c.radius}};
      break;
    case CurveKind::FourierCircle: {
      json modes = json::array();
      for (const auto& m : c.modes) modes.push_back({{"mode", m.mode}, {"amplitude", m.amplitude}, {"phase", m.phase}});
      j = {{"type", "fourier_circle"}, {"center", {c.center.x(), c.center.y()}}, {"radius", c.radius}, {"modes", modes}};
      break;
    }
    case CurveKind::File:
      j = {{"type", "file"}, {"path", c.path}};
      break;
    case CurveKind::AxialCircle:
      j = {{"type", "axial_circle"}, {"x", c.x}};
      break;
  }
  return j;
}

}  // namespace

AmbientSurface make_ambient(const AmbientSpec& spec) {
  switch (spec.kind) {
    case AmbientKind::EuclideanPlane: return AmbientSurface::plane();
    case AmbientKind::FlatCylinder: return AmbientSurface::cylinder(spec.circumference);
    case AmbientKind::Sphere: return AmbientSurface::sphere(spec.K0);
    case AmbientKind::HyperbolicDisc: return AmbientSurface::hyperbolic_disc(spec.K0);
  }
  throw InvalidArgument("unknown ambient kind");
}

void ExperimentConfig::validate() const {
  flow.validate();
  solver.validate();
  if (n_vertices < 8) throw InvalidArgument("n_vertices must be at least 8");
  if (modulus_every < 1) throw InvalidArgument("modulus_every must be positive");
  if (svg_every < 1) throw InvalidArgument("svg_every must be positive");
  make_ambient(ambient);
}

PolyCurved build_curve(const CurveSpec& spec, Eigen::Index n, const AmbientSpec& ambient, const std::string& base_dir) {
  const bool cylinder = ambient.kind == AmbientKind::FlatCylinder;
  if (spec.kind == CurveKind::AxialCircle && !cylinder)
    throw InvalidArgument("axial_circle curves need a cylinder ambient");
  if (cylinder && (spec.kind == CurveKind::Circle || spec.kind == CurveKind::FourierCircle))
    throw InvalidArgument("cylinder experiments take axial_circle or file curves");
  switch (spec.kind) {
    case CurveKind::Circle: return analytic::circle(spec.center, spec.radius, n);
    case CurveKind::FourierCircle: return analytic::fourier_circle(spec.center, spec.radius, spec.modes, n);
    case CurveKind::AxialCircle: return analytic::axial_circle(spec.x, ambient.circumference, n);
    case CurveKind::File: {
      std::filesystem::path p(spec.path);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      PolyCurved c = read_curve_csv(p.string());
      if (cylinder) c.period = ambient.circumference;
      return c;
    }
  }
  throw InvalidArgument("unknown curve kind");
}

NestedAnnulus build_annulus(const ExperimentConfig& cfg) {
  return make_annulus(build_curve(cfg.inner, cfg.n_vertices, cfg.ambient, cfg.base_dir),
                      build_curve(cfg.outer, cfg.n_vertices, cfg.ambient, cfg.base_dir), make_ambient(cfg.ambient));
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root,
             {"ambient", "inner", "outer", "n_vertices", "t_end", "dt_safety", "resample_threshold", "min_sep_floor",
              "record_every", "n_sources_per_boundary", "collocation_factor", "offset_ratio_in", "offset_ratio_out",
              "grid_n", "residual_tolerance", "modulus_every", "output_dir", "emit_svg", "svg_every"},
             "config");
  for (const char* key : {"ambient", "inner", "outer", "t_end"})
    if (!root.contains(key)) throw InvalidArgument(std::string("config is missing '") + key + "'");

  ExperimentConfig cfg;
  cfg.base_dir = base_dir;

  const json& amb = root["ambient"];
  check_keys(amb, {"kind", "K0", "circumference"}, "ambient");
  if (!amb.contains("kind") || !amb["kind"].is_string()) throw InvalidArgument("ambient.kind must be a string");
  cfg.ambient.kind = ambient_kind_from_string(amb["kind"].get<std::string>());
  const double default_K0 = cfg.ambient.kind == AmbientKind::Sphere ? 1.0
                            : cfg.ambient.kind == AmbientKind::HyperbolicDisc ? -1.0 : 0.0;
  cfg.ambient.K0 = get_number(amb, "K0", default_K0, "ambient");
  cfg.ambient.circumference = get_number(amb, "circumference", 1.0, "ambient");

  cfg.inner = parse_curve(root["inner"], "inner");
  cfg.outer = parse_curve(root["outer"], "outer");

  cfg.n_vertices = get_integer(root, "n_vertices", cfg.n_vertices, "config");
  cfg.flow.t_end = get_number(root, "t_end", cfg.flow.t_end, "config");
  cfg.flow.dt_safety = get_number(root, "dt_safety", cfg.flow.dt_safety, "config");
  cfg.flow.resample_threshold = get_number(root, "resample_threshold", cfg.flow.resample_threshold, "config");
  cfg.flow.min_sep_floor = get_number(root, "min_sep_floor", cfg.flow.min_sep_floor, "config");
  cfg.flow.record_every = static_cast<int>(get_integer(root, "record_every", cfg.flow.record_every, "config"));
  cfg.flow.n_vertices = cfg.n_vertices;

  cfg.solver.n_sources_per_boundary =
      static_cast<int>(get_integer(root, "n_sources_per_boundary", cfg.solver.n_sources_per_boundary, "config"));
  cfg.solver.collocation_factor =
      static_cast<int>(get_integer(root, "collocation_factor", cfg.solver.collocation_factor, "config"));
  cfg.solver.offset_ratio_in = get_number(root, "offset_ratio_in", cfg.solver.offset_ratio_in, "config");
  cfg.solver.offset_ratio_out = get_number(root, "offset_ratio_out", cfg.solver.offset_ratio_out, "config");
  cfg.solver.grid_n = static_cast<int>(get_integer(root, "grid_n", cfg.solver.grid_n, "config"));
  cfg.solver.residual_tolerance = get_number(root, "residual_tolerance", cfg.solver.residual_tolerance, "config");

  cfg.modulus_every = static_cast<int>(get_integer(root, "modulus_every", cfg.flow.record_every, "config"));
  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) throw InvalidArgument("config.output_dir must be a string");
    cfg.output_dir = root["output_dir"].get<std::string>();
  }
  if (root.contains("emit_svg")) {
    if (!root["emit_svg"].is_boolean()) throw InvalidArgument("config.emit_svg must be true or false");
    cfg.emit_svg = root["emit_svg"].get<bool>();
  }
  cfg.svg_every = static_cast<int>(get_integer(root, "svg_every", cfg.svg_every, "config"));

  cfg.validate();
  build_annulus(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
  if (cfg.base_dir.empty()) cfg.base_dir = ".";
  if (!cfg.output_dir.empty() && std::filesystem::path(cfg.output_dir).is_relative())
    cfg.output_dir = (std::filesystem::path(cfg.base_dir) / cfg.output_dir).lexically_normal().string();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["ambient"] = {{"kind", to_string(cfg.ambient.kind)}, {"K0", cfg.ambient.K0}, {"circumference", cfg.ambient.circumference}};
  j["inner"] = curve_json(cfg.inner);
  j["outer"] = curve_json(cfg.outer);
  j["n_vertices"] = cfg.n_vertices;
  j["t_end"] = cfg.flow.t_end;
  j["dt_safety"] = cfg.flow.dt_safety;
  j["resample_threshold"] = cfg.flow.resample_threshold;
  j["min_sep_floor"] = cfg.flow.min_sep_floor;
  j["record_every"] = cfg.flow.record_every;
  j["n_sources_per_boundary"] = cfg.solver.n_sources_per_boundary;
  j["collocation_factor"] = cfg.solver.collocation_factor;
  j["offset_ratio_in"] = cfg.solver.offset_ratio_in;
  j["offset_ratio_out"] = cfg.solver.offset_ratio_out;
  j["grid_n"] = cfg.solver.grid_n;
  j["residual_tolerance"] = cfg.solver.residual_tolerance;
  j["modulus_every"] = cfg.modulus_every;
  j["output_dir"] = cfg.output_dir;
  j["emit_svg"] = cfg.emit_svg;
  j["svg_every"] = cfg.svg_every;
  return j.dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig keyed = cfg;
  keyed.output_dir.clear();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : config_to_json(keyed)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace csf
