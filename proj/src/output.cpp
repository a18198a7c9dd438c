#include "fvgw/output.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fvgw {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_monitor_header(std::ostream& out) { out << kMonitorHeader << '\n'; }

void write_monitor_row(std::ostream& out, const MonitorRecord& r) {
  fmt::print(out, "{},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.step, r.time, r.dt,
             r.newton_iters, r.min_s, r.max_s, r.gas_energy, r.water_energy, r.water_mass_defect);
}

void write_monitors_csv(const std::filesystem::path& path, const std::vector<MonitorRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  write_monitor_header(out);
  for (const auto& r : records) write_monitor_row(out, r);
}

void write_fields_csv(std::ostream& out, const Mesh& mesh, const State& state) {
  const int dim = mesh.dimension();
  out << (dim == 3 ? "cell_id,x,y,z,p,s\n" : "cell_id,x,y,p,s\n");
  for (const Cell& c : mesh.cells()) {
    fmt::print(out, "{},{:.17g},{:.17g}", c.id, c.center.x(), c.center.y());
    if (dim == 3) fmt::print(out, ",{:.17g}", c.center.z());
    fmt::print(out, ",{:.17g},{:.17g}\n", state.p[c.id], state.s[c.id]);
  }
}

void write_vtk(std::ostream& out, const Mesh& mesh, const State& state, std::string_view title) {
  const Index n = mesh.num_cells();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  if (const auto& lat = mesh.lattice()) {
    const Index nx = lat->counts[0], ny = lat->counts[1], nz = lat->counts[2];
    const bool three = mesh.dimension() == 3;
    const Index px = nx + 1, py = ny + 1, pz = three ? nz + 1 : 1;
    const Vec3 h = lat->spacing();
    fmt::print(out, "POINTS {} double\n", px * py * pz);
    for (Index k = 0; k < pz; ++k)
      for (Index j = 0; j < py; ++j)
        for (Index i = 0; i < px; ++i) {
          const Vec3 x = lat->extent.lower + Vec3(i * h.x(), j * h.y(), three ? k * h.z() : 0.0);
          fmt::print(out, "{:.17g} {:.17g} {:.17g}\n", x.x(), x.y(), x.z());
        }
    auto pid = [&](Index i, Index j, Index k) { return i + px * (j + py * k); };
    const int per = three ? 8 : 4;
    fmt::print(out, "CELLS {} {}\n", n, n * (per + 1));
    for (Index c = 0; c < n; ++c) {
      const auto [i, j, k] = lat->cell_coords(c);
      if (three) {
        fmt::print(out, "8 {} {} {} {} {} {} {} {}\n", pid(i, j, k), pid(i + 1, j, k), pid(i + 1, j + 1, k),
                   pid(i, j + 1, k), pid(i, j, k + 1), pid(i + 1, j, k + 1), pid(i + 1, j + 1, k + 1),
                   pid(i, j + 1, k + 1));
      } else {
        fmt::print(out, "4 {} {} {} {}\n", pid(i, j, 0), pid(i + 1, j, 0), pid(i + 1, j + 1, 0), pid(i, j + 1, 0));
      }
    }
    fmt::print(out, "CELL_TYPES {}\n", n);
    for (Index c = 0; c < n; ++c) out << (three ? "12\n" : "9\n");
  } else {
    fmt::print(out, "POINTS {} double\n", n);
    for (const Cell& c : mesh.cells())
      fmt::print(out, "{:.17g} {:.17g} {:.17g}\n", c.center.x(), c.center.y(), c.center.z());
    fmt::print(out, "CELLS {} {}\n", n, 2 * n);
    for (Index c = 0; c < n; ++c) fmt::print(out, "1 {}\n", c);
    fmt::print(out, "CELL_TYPES {}\n", n);
    for (Index c = 0; c < n; ++c) out << "1\n";
  }
  fmt::print(out, "CELL_DATA {}\n", n);
  for (const auto& [name, field] : {std::pair{"p", &state.p}, std::pair{"s", &state.s}}) {
    fmt::print(out, "SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
    for (Index c = 0; c < n; ++c) fmt::print(out, "{:.17g}\n", (*field)[c]);
  }
}

void write_metadata(const std::filesystem::path& path, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["c1"] = meta.c1;
  j["c1_definition"] = "m0 * rho_min";
  j["residual_scaled_by_cell_volume"] = meta.residual_scaled;
  j["jacobian"] = meta.jacobian;
  j["linear_solver"] = meta.linear_solver;
  j["steps"] = meta.steps;
  j["failed_steps"] = meta.failed_steps;
  j["aborted"] = meta.aborted;
  if (meta.aborted) j["abort_reason"] = meta.abort_reason;
  j["hypotheses"] = meta.hypothesis_notes;
  j["field_files"] = meta.field_files;
  j["config"] = meta.config_text;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
}

}  // namespace fvgw
