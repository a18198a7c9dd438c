#include "fvgw/convergence.hpp"
#include "fvgw/fluxes.hpp"
#include "fvgw/simulation.hpp"
#include "fvgw/verify.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace {

int cmd_simulate(const std::string& path) {
  std::unique_ptr<fvgw::Problem> problem;
  try {
    problem = std::make_unique<fvgw::Problem>(fvgw::load_config(path));
  } catch (const fvgw::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  }
  try {
    const fvgw::SimulationResult res = fvgw::simulate(*problem, true);
    const auto& tr = res.trajectory;
    if (tr.aborted) {
      fmt::print(stderr, "run aborted: {}\n", tr.abort_reason);
      return 3;
    }
    double lo = 1.0, hi = 0.0;
    for (const auto& m : tr.monitors) {
      lo = std::min(lo, m.min_s);
      hi = std::max(hi, m.max_s);
    }
    fmt::print("{} steps ({} failed) to t = {:.6g}; s in [{:.3e}, {:.12f}]; output in {}\n", tr.monitors.size(),
               tr.failed_steps, tr.monitors.empty() ? 0.0 : tr.monitors.back().time, lo, hi,
               res.output_directory.string());
  } catch (const std::exception& e) {
    fmt::print(stderr, "run aborted: {}\n", e.what());
    return 3;
  }
  return 0;
}

int cmd_verify(bool full, const std::string& suite) {
  fvgw::VerifyOptions opt;
  opt.full = full;
  opt.seed = fvgw::verify_seed_from_env(opt.seed);
  if (!suite.empty()) opt.filter = suite;
  const auto results = fvgw::run_verify(opt);
  if (results.empty()) {
    fmt::print(stderr, "no suite matches '{}'\n", suite);
    return 2;
  }
  int failed = 0;
  for (const auto& r : results) {
    fmt::print("[{}] {}.{} ({:.2f} s): {}\n", r.pass ? "PASS" : "FAIL", r.module, r.name, r.seconds, r.detail);
    failed += r.pass ? 0 : 1;
  }
  fmt::print("{} suites, {} failed (seed {}, {})\n", results.size(), failed, opt.seed, full ? "full" : "quick");
  return failed ? 1 : 0;
}

int cmd_convergence(const std::string& path, int levels) {
  fvgw::SimulationConfig cfg;
  try {
    cfg = fvgw::load_config(path);
  } catch (const fvgw::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  }
  try {
    const fvgw::ErrorTable table = fvgw::run_convergence(cfg, levels);
    fmt::print("{}", fvgw::format_error_table(table));
    const auto dir = fvgw::resolve_output_directory(cfg);
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "convergence.csv", std::ios::binary);
    fvgw::write_error_table_csv(csv, table);
    fmt::print("table written to {}\n", (dir / "convergence.csv").string());
  } catch (const fvgw::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "convergence study failed: {}\n", e.what());
    return 3;
  }
  return 0;
}

int cmd_check_mesh(const std::string& path) {
  try {
    const fvgw::Mesh mesh = fvgw::read_mesh_file(path);
    const auto rep = fvgw::check_admissibility(mesh);
    fmt::print("cells {}  interior faces {}  boundary faces {} ({} water-injection)\n", mesh.num_cells(),
               mesh.interior_faces().size(), mesh.boundary_faces().size(), mesh.dirichlet_faces().size());
    fmt::print("size h = {:.6g}  regularity = {:.6g}  volume = {:.6g}\n", mesh.size(), rep.regularity,
               mesh.domain_volume());
    fmt::print("orthogonality defect = {:.3e} rad (tolerance {:.0e})\n", rep.orthogonality_defect,
               fvgw::kOrthogonalityTolerance);
    fmt::print("admissible: {}\n", rep.pass ? "yes" : "no");
    return rep.pass ? 0 : 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "mesh error: {}\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume gas-water flow in porous media"};
  app.require_subcommand(1);

  std::string sim_cfg;
  auto* sim = app.add_subcommand("simulate", "Run a configuration and write fields and monitors");
  sim->add_option("config", sim_cfg, "TOML configuration")->required();

  bool quick = false, full = false;
  std::string suite, fault;
  auto* ver = app.add_subcommand("verify", "Run the property suites");
  auto* q = ver->add_flag("--quick", quick, "Fixed seeds, reduced sampling (default)");
  ver->add_flag("--full", full, "Extended sampling")->excludes(q);
  ver->add_option("--suite", suite, "Suite, module, or module.suite");
  ver->add_option("--inject-fault", fault)->check(CLI::IsMember({"g2-sign"}))->group("");

  std::string conv_cfg;
  int levels = 3;
  auto* conv = app.add_subcommand("convergence", "Mesh-refinement study against a finer reference");
  conv->add_option("config", conv_cfg, "TOML configuration")->required();
  conv->add_option("--levels", levels, "Number of levels (>= 3)")->check(CLI::PositiveNumber);

  std::string mesh_file;
  auto* chk = app.add_subcommand("check-mesh", "Print the admissibility report of a mesh file");
  chk->add_option("file", mesh_file, "Mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*sim) return cmd_simulate(sim_cfg);
  if (*ver) {
    if (fault == "g2-sign") fvgw::set_flux_fault(fvgw::FluxFault::g2_sign);
    return cmd_verify(full, suite);
  }
  if (*conv) return cmd_convergence(conv_cfg, levels);
  if (*chk) return cmd_check_mesh(mesh_file);
  return 2;
}
