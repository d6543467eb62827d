#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "csflab/curve_io.hpp"
#include "csflab/harness.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace csf;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const char* kConcentric = R"({
  "ambient": {"kind": "plane"},
  "inner": {"type": "circle", "center": [0, 0], "radius": 1},
  "outer": {"type": "circle", "center": [0, 0], "radius": 2},
  "t_end": 0.4
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("csflab_harness_" + name);
  fs::remove_all(d);
  return d;
}

std::string with(const std::string& base, const std::string& extra) {
  return base.substr(0, base.rfind('}')) + ", " + extra + "}";
}

}  // namespace

TEST_CASE("parse_config") {
  const ExperimentConfig cfg = parse_config(kConcentric);
  CHECK(cfg.ambient.kind == AmbientKind::EuclideanPlane);
  CHECK(cfg.inner.radius == 1.0);
  CHECK(cfg.outer.radius == 2.0);
  CHECK(cfg.flow.t_end == 0.4);
  CHECK(cfg.n_vertices == 256);
  CHECK(cfg.modulus_every == cfg.flow.record_every);
  CHECK_FALSE(cfg.emit_svg);

  const ExperimentConfig s = parse_config(R"({"ambient": {"kind": "sphere"}, "t_end": 0.1,
      "inner": {"type": "circle", "radius": 0.5}, "outer": {"type": "circle", "radius": 0.8},
      "n_vertices": 64, "modulus_every": 3, "n_sources_per_boundary": 48})");
  CHECK(s.ambient.K0 == 1.0);
  CHECK(s.modulus_every == 3);
  CHECK(s.solver.n_sources_per_boundary == 48);

  SUBCASE("rejects malformed configs") {
    for (const std::string& bad : {
             with(kConcentric, R"("colour": "red")"),
             with(kConcentric, R"("n_vertices": 12.5)"),
             with(kConcentric, R"("emit_svg": 1)"),
             with(kConcentric, R"("dt_safety": -1)"),
             std::string(R"({"ambient": {"kind": "plane"}, "inner": {"type": "circle", "radius": 1},
                             "outer": {"type": "circle", "radius": 2}})"),
             std::string(R"({"ambient": {"kind": "torus"}, "inner": {"type": "circle", "radius": 1},
                             "outer": {"type": "circle", "radius": 2}, "t_end": 1})"),
             std::string(R"({"ambient": {"kind": "plane"}, "inner": {"type": "circle", "radius": 1, "spin": 2},
                             "outer": {"type": "circle", "radius": 2}, "t_end": 1})"),
             std::string(R"({"ambient": {"kind": "plane"}, "inner": {"type": "circle", "radius": 3},
                             "outer": {"type": "circle", "radius": 2}, "t_end": 1})"),
             std::string(R"({"ambient": {"kind": "plane"}, "t_end": 1, "inner": {"type": "circle", "radius": 1},
                             "outer": {"type": "fourier_circle", "radius": 2, "modes": [{"mode": 2, "amplitude": 1.5}]}})"),
             std::string(R"({"ambient": {"kind": "cylinder"}, "t_end": 1, "inner": {"type": "circle", "radius": 1},
                             "outer": {"type": "circle", "radius": 2}})"),
             std::string(R"({"ambient": {"kind": "plane"}, "t_end": 1, "inner": {"type": "file", "path": "nowhere.csv"},
                             "outer": {"type": "circle", "radius": 2}})"),
             std::string("{not json"),
         })
      CHECK_THROWS(parse_config(bad));
  }
}

TEST_CASE("load_config resolves files against the config directory") {
  const fs::path dir = fresh_dir("load");
  write_curve_csv((dir / "curves" / "inner.csv").string(), analytic::circle({0.0, 0.0}, 1.0, 128));
  std::ofstream(dir / "exp.json") << R"({"ambient": {"kind": "plane"}, "t_end": 0.01, "n_vertices": 128,
      "inner": {"type": "file", "path": "curves/inner.csv"},
      "outer": {"type": "circle", "radius": 2}, "output_dir": "out"})";
  const ExperimentConfig cfg = load_config((dir / "exp.json").string());
  CHECK(fs::path(cfg.output_dir).filename() == "out");
  CHECK(build_annulus(cfg).inner.size() == 128);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("config hash") {
  const ExperimentConfig a = parse_config(kConcentric);
  const std::string h = config_hash(a);
  CHECK(std::regex_match(h, std::regex("[0-9a-f]{16}")));
  CHECK(config_hash(parse_config(kConcentric)) == h);
  CHECK(config_hash(parse_config(config_to_json(a))) == h);
  CHECK(config_hash(parse_config(with(kConcentric, R"("output_dir": "elsewhere")"))) == h);
  CHECK(config_hash(parse_config(with(kConcentric, R"("dt_safety": 0.3)"))) != h);
}

TEST_CASE("run_experiment: concentric circles follow the composed radius law") {
  ExperimentConfig cfg = parse_config(with(kConcentric, R"("record_every": 200)"));
  const FlowTrace tr = run_experiment(cfg);
  REQUIRE(tr.records.size() > 5);
  CHECK(tr.records.back().t == 0.4);
  CHECK_FALSE(tr.metadata.failure);
  CHECK(tr.metadata.failed_solves == 0);
  CHECK(tr.metadata.modulus_solves == static_cast<int>(tr.records.size()));
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    const TraceRecord& r = tr.records[i];
    const double law = analytic::concentric_modulus(analytic::circle_radius(1.0, r.t), analytic::circle_radius(2.0, r.t));
    CHECK(std::abs(r.h - law) <= 1e-3);
    CHECK(r.area_annulus == r.area_outer - r.area_inner);
    CHECK(r.K0 == 0.0);
    if (i > 0) {
      CHECK(r.t > tr.records[i - 1].t);
      CHECK(r.h > tr.records[i - 1].h);
    }
  }
}

TEST_CASE("run_experiment: cylinder band is rigid") {
  const ExperimentConfig cfg = parse_config(R"({"ambient": {"kind": "cylinder", "circumference": 1},
      "inner": {"type": "axial_circle", "x": 0.3}, "outer": {"type": "axial_circle", "x": 0.8},
      "n_vertices": 32, "t_end": 1, "record_every": 500})");
  const FlowTrace tr = run_experiment(cfg);
  CHECK(tr.records.back().t == 1.0);
  for (const auto& r : tr.records) {
    CHECK(std::abs(r.h - 0.5) <= 1e-9);
    CHECK(std::abs(r.dlogh_dt) <= 1e-6);
  }
}

TEST_CASE("run_experiment: sphere latitude circles") {
  ExperimentConfig cfg;
  cfg.ambient = {AmbientKind::Sphere, 1.0, 1.0};
  cfg.inner.radius = analytic::latitude_chart_radius(1.0);
  cfg.outer.radius = analytic::latitude_chart_radius(1.4);
  cfg.n_vertices = 128;
  cfg.flow.t_end = 0.2;
  cfg.flow.record_every = cfg.modulus_every = 50;
  const FlowTrace tr = run_experiment(cfg);
  REQUIRE(tr.records.size() > 3);
  for (std::size_t i = 1; i + 1 < tr.records.size(); ++i) CHECK(tr.records[i].dlogh_dt >= 1.0 - 0.02);
  CHECK(tr.records.front().K0 == 1.0);
}

TEST_CASE("run_experiment: flow failure truncates the trace") {
  const ExperimentConfig cfg = parse_config(R"({"ambient": {"kind": "plane"}, "n_vertices": 64, "t_end": 0.2,
      "inner": {"type": "circle", "radius": 0.3}, "outer": {"type": "circle", "radius": 2}})");
  FlowTrace tr;
  CHECK_NOTHROW(tr = run_experiment(cfg));
  REQUIRE(tr.metadata.failure);
  CHECK(tr.metadata.failure_time == doctest::Approx(0.045).epsilon(0.05));
  CHECK(tr.records.back().t < 0.2);
}

TEST_CASE("run_experiment: failed solves leave NaN and the run continues") {
  ExperimentConfig cfg = parse_config(with(kConcentric, R"("n_vertices": 64, "t_end": 0.01, "residual_tolerance": 1e-300)"));
  const FlowTrace tr = run_experiment(cfg);
  CHECK(tr.records.back().t == 0.01);
  CHECK_FALSE(tr.metadata.failure);
  CHECK(tr.metadata.failed_solves == tr.metadata.modulus_solves);
  CHECK(tr.metadata.retried_solves == tr.metadata.modulus_solves);
  for (const auto& r : tr.records) {
    CHECK(std::isnan(r.h));
    CHECK(std::isnan(r.dlogh_dt));
    CHECK(std::isfinite(r.area_annulus));
  }
}

TEST_CASE("run_experiment output files are deterministic") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  for (const fs::path& d : {a, b}) {
    ExperimentConfig cfg = parse_config(R"({"ambient": {"kind": "plane"}, "n_vertices": 96, "t_end": 0.05,
        "inner": {"type": "fourier_circle", "radius": 1, "modes": [{"mode": 3, "amplitude": 0.05, "phase": 0.2}]},
        "outer": {"type": "circle", "center": [0.1, 0], "radius": 2}, "emit_svg": true, "svg_every": 100})");
    cfg.output_dir = d.string();
    run_experiment(cfg);
  }
  std::size_t svgs = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename() == "metadata.json") continue;
    const fs::path other = b / e.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(e.path()) == slurp(other));
    svgs += e.path().extension() == ".svg";
  }
  CHECK(svgs >= 2);
  CHECK(slurp(a / "trace.csv").rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  const auto meta = nlohmann::json::parse(slurp(a / "metadata.json"));
  CHECK(meta["config_hash"].get<std::string>().size() == 16);
  CHECK(meta["config_hash"] == nlohmann::json::parse(slurp(b / "metadata.json"))["config_hash"]);
  CHECK(meta["failure"].is_null());
  CHECK(slurp(a / "diagnostics.csv").rfind("t,h,E,dE_dt_boundary", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("emit_svg") {
  FlowState s;
  s.annulus = analytic::concentric_annulus(1.0, 2.0, 256);
  const std::string doc = svg_document(s);
  CHECK(doc.find("<svg") != std::string::npos);
  CHECK(doc.find("viewBox=") != std::string::npos);
  const std::regex path_re("<path class=\"(inner|outer)\" d=\"([^\"]*)\"");
  int paths = 0;
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), path_re); it != std::sregex_iterator(); ++it) {
    ++paths;
    const std::string d = (*it)[2];
    CHECK(std::count(d.begin(), d.end(), 'M') + std::count(d.begin(), d.end(), 'L') == 256);
  }
  CHECK(paths == 2);
  CHECK(svg_document(s) == doc);

  SUBCASE("cylinder states show period guides") {
    FlowState c;
    c.annulus = analytic::cylinder_band(0.3, 0.8, 64);
    const std::string cd = svg_document(c);
    CHECK(cd.find("class=\"period\"") != std::string::npos);
    CHECK(cd.find("class=\"inner\"") != std::string::npos);
    CHECK(cd.find("class=\"outer\"") != std::string::npos);
  }
  SUBCASE("creates missing directories") {
    const fs::path dir = fresh_dir("svg");
    emit_svg(s, (dir / "a" / "b" / "frame.svg").string());
    CHECK(slurp(dir / "a" / "b" / "frame.svg") == doc);
    std::ofstream(dir / "plain") << "x";
    CHECK_THROWS_AS(emit_svg(s, (dir / "plain" / "frame.svg").string()), IoError);
    fs::remove_all(dir);
  }
}

TEST_CASE("capacity_solution_json") {
  const NestedAnnulus a = analytic::concentric_annulus(1.0, 2.0, 128);
  const auto j = nlohmann::json::parse(capacity_solution_json(solve_capacity_mfs(a)));
  CHECK(j["source_points"]["inner"].size() == 64);
  CHECK(j["coefficients"]["outer"].size() == 64);
  CHECK(j["h"].get<double>() == doctest::Approx(std::log(2.0) / (2.0 * pi)).epsilon(1e-8));
  CHECK(j["chart"]["map"] == "identity");
  CapacitySolution empty;
  CHECK(nlohmann::json::parse(capacity_solution_json(empty))["E"].is_null());
}

TEST_CASE("verify filters") {
  const VerifyReport none = verify("nonexistent");
  CHECK(none.results.empty());
  CHECK(none.warnings.size() == 1);
  CHECK(none.all_passed());

  const VerifyReport one = verify("A7");
  REQUIRE(one.results.size() == 1);
  CHECK(one.results[0].name == "bochner consistency");
  CHECK(one.results[0].passed);
  CHECK(format_result(one.results[0]).rfind("PASS A7", 0) == 0);

  std::ostringstream progress;
  const VerifyReport conc = verify("Concentric", &progress);
  REQUIRE(conc.results.size() == 1);
  CHECK(conc.results[0].id == "A1");
  CHECK(conc.results[0].passed);
  CHECK(progress.str().rfind("PASS A1", 0) == 0);
}
