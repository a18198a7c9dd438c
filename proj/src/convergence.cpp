#include "fvgw/convergence.hpp"

#include "fvgw/simulation.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <cmath>
#include <ostream>

namespace fvgw {

SimulationConfig refine_config(const SimulationConfig& base, int level) {
  if (base.mesh.file) throw ConfigError("refinement of an external mesh file is not nested; use a rectangular [mesh]");
  if (level < 0) throw ConfigError("refinement level must be nonnegative");
  SimulationConfig cfg = base;
  const Index factor = Index{1} << level;
  for (int a = 0; a < cfg.mesh.rect.dimension; ++a) cfg.mesh.rect.counts[static_cast<std::size_t>(a)] *= factor;
  cfg.solver.dt /= static_cast<double>(factor);
  cfg.solver.dt_min = std::min(cfg.solver.dt_min, cfg.solver.dt);
  return cfg;
}

CellField restrict_to(const Mesh& fine, const CellField& values, const Mesh& coarse) {
  if (!fine.lattice() || !coarse.lattice()) throw ConfigError("restriction needs lattice meshes");
  const Lattice& lf = *fine.lattice();
  const Lattice& lc = *coarse.lattice();
  std::array<Index, 3> ratio{};
  for (std::size_t a = 0; a < 3; ++a) {
    if (lf.counts[a] % lc.counts[a] != 0) throw ConfigError("meshes are not nested");
    ratio[a] = lf.counts[a] / lc.counts[a];
  }
  CellField sum = CellField::Zero(coarse.num_cells());
  CellField vol = CellField::Zero(coarse.num_cells());
  for (Index k = 0; k < fine.num_cells(); ++k) {
    const auto c = lf.cell_coords(k);
    const Index target = lc.cell_index(c[0] / ratio[0], c[1] / ratio[1], c[2] / ratio[2]);
    sum[target] += fine.cell(k).volume * values[k];
    vol[target] += fine.cell(k).volume;
  }
  return sum.cwiseQuotient(vol);
}

namespace {

struct LevelRun {
  Mesh mesh;
  State final;
  double dt;
};

LevelRun run_level(const SimulationConfig& base, int level) {
  Problem problem(refine_config(base, level));
  SimulationResult res = simulate(problem, false);
  if (res.trajectory.aborted)
    throw std::runtime_error(fmt::format("level {} aborted: {}", level, res.trajectory.abort_reason));
  return {problem.mesh(), res.trajectory.saved.back().state, problem.config().solver.dt};
}

double l2_error(const Mesh& mesh, const CellField& a, const CellField& b) { return l2_norm(mesh, a - b); }

}  // namespace

ErrorTable run_convergence(const SimulationConfig& base, int levels, int reference_offset) {
  if (levels < 3) throw ConfigError("a convergence study needs at least 3 levels");
  if (reference_offset < 1) throw ConfigError("the reference must be finer than the finest level");
  const auto start = std::chrono::steady_clock::now();
  ErrorTable table;
  table.reference_level = levels - 1 + reference_offset;
  const LevelRun ref = run_level(base, table.reference_level);
  table.reference_cells = ref.mesh.num_cells();

  for (int l = 0; l < levels; ++l) {
    const LevelRun run = run_level(base, l);
    ErrorLevel e;
    e.level = l;
    e.cells = run.mesh.num_cells();
    e.h = run.mesh.size();
    e.dt = run.dt;
    e.error_p = l2_error(run.mesh, run.final.p, restrict_to(ref.mesh, ref.final.p, run.mesh));
    e.error_s = l2_error(run.mesh, run.final.s, restrict_to(ref.mesh, ref.final.s, run.mesh));
    if (!table.levels.empty()) {
      const ErrorLevel& prev = table.levels.back();
      const double ratio = std::log(prev.h / e.h);
      if (prev.error_p > 0.0 && e.error_p > 0.0) e.order_p = std::log(prev.error_p / e.error_p) / ratio;
      if (prev.error_s > 0.0 && e.error_s > 0.0) e.order_s = std::log(prev.error_s / e.error_s) / ratio;
    }
    table.levels.push_back(e);
  }
  table.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

void write_error_table_csv(std::ostream& out, const ErrorTable& table) {
  out << "level,cells,h,dt,error_p,error_s,order_p,order_s\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string(); };
  for (const auto& e : table.levels)
    fmt::print(out, "{},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", e.level, e.cells, e.h, e.dt, e.error_p,
               e.error_s, opt(e.order_p), opt(e.order_s));
}

std::string format_error_table(const ErrorTable& table) {
  std::string out = fmt::format("{:>5} {:>8} {:>11} {:>11} {:>12} {:>12} {:>8} {:>8}\n", "level", "cells", "h", "dt",
                                "L2 err p", "L2 err s", "order p", "order s");
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:8.3f}", *v) : std::string(8, ' '); };
  for (const auto& e : table.levels)
    out += fmt::format("{:>5} {:>8} {:>11.4e} {:>11.4e} {:>12.5e} {:>12.5e} {} {}\n", e.level, e.cells, e.h, e.dt,
                       e.error_p, e.error_s, opt(e.order_p), opt(e.order_s));
  out += fmt::format("reference: level {} ({} cells); {:.1f} s\n", table.reference_level, table.reference_cells,
                     table.seconds);
  return out;
}

}  // namespace fvgw
