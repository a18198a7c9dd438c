#pragma once

// CSV monitor and field tables, legacy VTK unstructured grids, run metadata.

#include "fvgw/mesh.hpp"
#include "fvgw/scheme.hpp"
#include "fvgw/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fvgw {

inline constexpr std::string_view kMonitorHeader =
    "step,time,dt,newton_iters,min_s,max_s,gas_energy,water_energy,water_mass_defect";

/// RFC 4180 quoting: fields with a comma, quote or line break are quoted.
std::string csv_escape(std::string_view field);

void write_monitor_header(std::ostream& out);
void write_monitor_row(std::ostream& out, const MonitorRecord& rec);
void write_monitors_csv(const std::filesystem::path& path, const std::vector<MonitorRecord>& records);

/// cell_id,x,y[,z],p,s
void write_fields_csv(std::ostream& out, const Mesh& mesh, const State& state);

/// Legacy ASCII unstructured grid with cell data p and s. Lattice meshes
/// become quads/hexahedra; other meshes one vertex per cell center.
void write_vtk(std::ostream& out, const Mesh& mesh, const State& state, std::string_view title);

struct RunMetadata {
  std::string config_text;  // canonical
  double c1 = 0.0;
  bool residual_scaled = true;
  std::string jacobian;
  std::string linear_solver;
  int steps = 0;
  int failed_steps = 0;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> hypothesis_notes;
  std::vector<std::string> field_files;
};

void write_metadata(const std::filesystem::path& path, const RunMetadata& meta);

}  // namespace fvgw
