#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "csflab/curve_io.hpp"
#include "csflab/harness.hpp"

namespace {

using namespace csf;

int simulate(const std::string& path, const std::string& output_dir) {
  ExperimentConfig cfg = load_config(path);
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  const FlowTrace tr = run_experiment(cfg);
  const TraceRecord &a = tr.records.front(), &b = tr.records.back();
  std::printf("config %s: %zu records, t = %.6g .. %.6g\n", tr.metadata.config_hash.c_str(), tr.records.size(), a.t,
              b.t);
  std::printf("h: %.10g -> %.10g\n", a.h, b.h);
  std::printf("modulus solves %d (retried %d, failed %d), max boundary residual %.3e\n", tr.metadata.modulus_solves,
              tr.metadata.retried_solves, tr.metadata.failed_solves, tr.metadata.max_boundary_residual);
  if (tr.metadata.failure) std::printf("flow stopped at t = %.6g: %s\n", tr.metadata.failure_time, tr.metadata.failure->c_str());
  if (!cfg.output_dir.empty()) std::printf("wrote %s\n", cfg.output_dir.c_str());
  return 0;
}

struct ModulusArgs {
  std::string inner, outer, ambient = "plane";
  double K0 = kNaN, circumference = 1.0;
  bool fd = false, json = false;
  int sources = 64;
};

int modulus_cmd(const ModulusArgs& m) {
  AmbientSpec spec;
  spec.kind = ambient_kind_from_string(m.ambient);
  spec.K0 = std::isnan(m.K0) ? (spec.kind == AmbientKind::Sphere ? 1.0 : spec.kind == AmbientKind::HyperbolicDisc ? -1.0 : 0.0)
                             : m.K0;
  spec.circumference = m.circumference;
  const NestedAnnulus a = make_annulus(read_curve_csv(m.inner), read_curve_csv(m.outer), make_ambient(spec));
  SolverParams p;
  p.n_sources_per_boundary = m.sources;
  const CapacitySolution sol = m.fd ? solve_capacity_fd(a, p) : solve_capacity_mfs(a, p);
  if (m.json) {
    std::cout << capacity_solution_json(sol) << '\n';
  } else {
    std::printf("h = %.12g\nE = %.12g\n", sol.h, sol.E);
    if (!m.fd) std::printf("boundary residual = %.3e\n", sol.boundary_residual);
  }
  return 0;
}

int soliton(const std::string& name, const std::vector<std::string>& params, const std::string& out, double t) {
  const analytic::AnalyticOracle& o = analytic::find_oracle(name);
  analytic::ParamMap p;
  for (const std::string& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("parameter '" + kv + "' is not key=value");
    const std::string key = kv.substr(0, eq);
    if (!o.defaults.count(key)) throw InvalidArgument("oracle '" + name + "' has no parameter '" + key + "'");
    try {
      p[key] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("parameter '" + kv + "' needs a numeric value");
    }
  }
  std::printf("%s: %s\n", o.name.c_str(), o.closed_form.c_str());
  const std::vector<PolyCurved> curves = o.generate(p);
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto path = std::filesystem::path(out) / (name + "_" + std::to_string(k) + ".csv");
    write_curve_csv(path.string(), curves[k]);
    std::printf("wrote %s (%ld vertices)\n", path.string().c_str(), static_cast<long>(curves[k].size()));
  }
  for (const auto& [key, value] : o.exact_value(p, t)) std::printf("%s(t=%g) = %.12g\n", key.c_str(), t, value);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curve shortening flow and conformal modulus laboratory"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  auto* sim = app.add_subcommand("simulate", "Run an experiment from a JSON config");
  sim->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  sim->add_option("-o,--output-dir", output_dir, "Override the config's output_dir");

  ModulusArgs m;
  auto* mod = app.add_subcommand("modulus", "Conformal modulus of the annulus between two curve CSV files");
  mod->add_option("inner", m.inner, "Inner curve CSV")->required()->check(CLI::ExistingFile);
  mod->add_option("outer", m.outer, "Outer curve CSV")->required()->check(CLI::ExistingFile);
  mod->add_option("--ambient", m.ambient, "plane | cylinder | sphere | hyperbolic")
      ->check(CLI::IsMember({"plane", "cylinder", "sphere", "hyperbolic"}));
  mod->add_option("--K0", m.K0, "Curvature of the sphere or hyperbolic disc");
  mod->add_option("--circumference", m.circumference, "Cylinder circumference");
  mod->add_option("--sources", m.sources, "MFS sources per boundary");
  mod->add_flag("--fd", m.fd, "Use the finite-difference solver");
  mod->add_flag("--json", m.json, "Print the full solution as JSON");

  std::string sol_name, sol_out = ".";
  std::vector<std::string> sol_params;
  double sol_t = 0.0;
  auto* sol = app.add_subcommand("soliton", "Write an analytic reference solution as curve CSV files");
  sol->add_option("name", sol_name, "shrinking_circle | grim_reaper | concentric_annulus | sphere_latitude | mobius_annulus")
      ->required();
  sol->add_option("params", sol_params, "key=value parameters");
  sol->add_option("--out", sol_out, "Output directory");
  sol->add_option("--t", sol_t, "Time at which to report exact values");

  std::string filter;
  auto* ver = app.add_subcommand("verify", "Run the acceptance suite");
  ver->add_option("filter", filter, "Criterion id or name substring");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(config_path, output_dir);
    if (*mod) return modulus_cmd(m);
    if (*sol) return soliton(sol_name, sol_params, sol_out, sol_t);
    if (*ver) return verify(filter, &std::cout).all_passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
