#pragma once

// Mesh-refinement study: nested rectangular levels with dt scaled like h,
// errors against a finer reference injected by cell-containment averaging.

#include "fvgw/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fvgw {

struct ErrorLevel {
  int level = 0;
  Index cells = 0;
  double h = 0.0;
  double dt = 0.0;
  double error_p = 0.0;
  double error_s = 0.0;
  std::optional<double> order_p;  // against the previous level
  std::optional<double> order_s;
};

struct ErrorTable {
  std::vector<ErrorLevel> levels;
  int reference_level = 0;
  Index reference_cells = 0;
  double seconds = 0.0;
};

/// Configuration of refinement level l: every cell count and dt divided by
/// 2^l. Throws ConfigError for external meshes (refinement not nested).
SimulationConfig refine_config(const SimulationConfig& base, int level);

/// Block averages of a fine lattice field onto a coarse lattice that nests it.
CellField restrict_to(const Mesh& fine, const CellField& values, const Mesh& coarse);

/// levels >= 3; the reference is level (levels - 1 + reference_offset).
ErrorTable run_convergence(const SimulationConfig& base, int levels, int reference_offset = 1);

void write_error_table_csv(std::ostream& out, const ErrorTable& table);
std::string format_error_table(const ErrorTable& table);

}  // namespace fvgw
