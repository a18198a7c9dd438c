#include "fvgw/simulation.hpp"

#include <fmt/format.h>

#include <fstream>

namespace fvgw {

Mesh build_mesh(const SimulationConfig& config) {
  try {
    if (config.mesh.file) {
      std::filesystem::path p(*config.mesh.file);
      if (p.is_relative()) p = config.base_directory / p;
      Mesh mesh = read_mesh_file(p.string());
      const AdmissibilityReport adm = check_admissibility(mesh);
      if (!adm.pass)
        throw ConfigError(fmt::format("mesh '{}' is not admissible (orthogonality defect {:.3e} rad)", p.string(),
                                      adm.orthogonality_defect));
      return mesh;
    }
    return build_rect_mesh(config.mesh.rect);
  } catch (const MeshError& e) {
    throw ConfigError(fmt::format("[mesh] {}", e.what()));
  }
}

FluidModel build_model(const SimulationConfig& config, const Mesh& mesh, HypothesisReport* report) {
  const FluidSection& f = config.fluid;
  FluidModel m;
  try {
    m.density = Density(f.density);
    m.gas_mobility = Mobility(f.gas_mobility);
    m.water_mobility = Mobility(f.water_mobility);
    m.capillary = Capillary(f.capillary, f.capillary_offset);
  } catch (const ModelError& e) {
    throw ConfigError(fmt::format("[fluid] {}", e.what()));
  }
  m.water_density = f.water_density;
  m.total_mobility_floor = f.m0;
  m.gravity = config.gravity;
  m.test_mode = f.test_mode;
  const Index n = mesh.num_cells();
  m.porosity.resize(n);
  m.permeability.resize(n);
  for (Index k = 0; k < n; ++k) {
    m.porosity[k] = cell_average(mesh, k, f.porosity);
    m.permeability[k] = cell_average(mesh, k, f.permeability);
  }

  HypothesisReport rep;
  try {
    rep = validate_hypotheses(m, f.pressure_range, 1001);
  } catch (const ModelError& e) {
    throw ConfigError(fmt::format("[fluid] {}", e.what()));
  }
  if (!rep.all_pass() && !f.test_mode) {
    std::string msg;
    for (const auto& c : rep.checks)
      if (!c.pass)
        msg += fmt::format("{}{} violated ({}; worst {:.3g} at {:.6g})", msg.empty() ? "" : "; ", c.id, c.description,
                           c.worst_violation, c.location);
    throw ConfigError(fmt::format("[fluid] {}", msg));
  }
  if (report) *report = rep;
  return m;
}

Problem::Problem(SimulationConfig config)
    : config_(std::move(config)), mesh_(build_mesh(config_)) {
  const FluidModel model = build_model(config_, mesh_, &hypotheses_);
  try {
    disc_ = std::make_unique<Discretization>(mesh_, model, config_.boundary, config_.sources);
    const auto& init = config_.initial;
    initial_ = project_initial(
        mesh_, [&](const Vec3& x) { return init.pressure(x); }, [&](const Vec3& x) { return init.saturation(x); });
  } catch (const SchemeError& e) {
    throw ConfigError(e.what());
  } catch (const ModelError& e) {
    throw ConfigError(e.what());
  }
}

std::filesystem::path resolve_output_directory(const SimulationConfig& config) {
  std::filesystem::path dir(config.output.directory);
  if (dir.is_relative()) dir = config.base_directory / dir;
  return dir;
}

SimulationResult simulate(const Problem& problem, bool write_output) {
  const SimulationConfig& cfg = problem.config();
  const Discretization& disc = problem.discretization();
  SimulationResult result;
  result.output_directory = resolve_output_directory(cfg);

  std::ofstream monitors;
  if (write_output) {
    std::filesystem::create_directories(result.output_directory);
    monitors.open(result.output_directory / "monitors.csv", std::ios::binary);
    if (!monitors) throw std::runtime_error("cannot write monitors.csv");
    write_monitor_header(monitors);
  }
  // Monitors are streamed so an aborted run still leaves its history behind.
  result.trajectory = run_simulation(disc, problem.initial(), cfg.solver, [&](const MonitorRecord& rec, const State&) {
    if (write_output) {
      write_monitor_row(monitors, rec);
      monitors.flush();
    }
  });
  if (!write_output) return result;

  RunMetadata meta;
  meta.config_text = serialize_config(cfg);
  meta.c1 = result.trajectory.c1;
  meta.jacobian = std::string(to_string(cfg.solver.jacobian));
  meta.linear_solver = std::string(to_string(cfg.solver.linear_solver));
  meta.steps = static_cast<int>(result.trajectory.monitors.size());
  meta.failed_steps = result.trajectory.failed_steps;
  meta.aborted = result.trajectory.aborted;
  meta.abort_reason = result.trajectory.abort_reason;
  for (const auto& c : problem.hypotheses().checks) {
    std::string note = fmt::format("{}: {}", c.id, c.pass ? "pass" : "violated (test mode)");
    if (c.estimate) note += fmt::format(", estimated Hoelder exponent {:.3f}", *c.estimate);
    meta.hypothesis_notes.push_back(note);
  }

  if (cfg.output.fields || cfg.output.vtk) {
    for (const Snapshot& snap : result.trajectory.saved) {
      const std::string stem = fmt::format("fields_{:06d}", snap.step);
      if (cfg.output.fields) {
        std::ofstream out(result.output_directory / (stem + ".csv"), std::ios::binary);
        write_fields_csv(out, problem.mesh(), snap.state);
        meta.field_files.push_back(stem + ".csv");
      }
      if (cfg.output.vtk) {
        std::ofstream out(result.output_directory / (stem + ".vtk"), std::ios::binary);
        write_vtk(out, problem.mesh(), snap.state, fmt::format("fvgw step {} t={:.17g}", snap.step, snap.time));
        meta.field_files.push_back(stem + ".vtk");
      }
    }
  }
  {
    std::ofstream out(result.output_directory / "config.toml", std::ios::binary);
    out << meta.config_text;
  }
  write_metadata(result.output_directory / "metadata.json", meta);
  return result;
}

}  // namespace fvgw
