#include "fvgw/mesh.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <sstream>

namespace fvgw {

namespace {

struct LineReader {
  std::istream& in;
  int line_no = 0;

  bool next(std::istringstream& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      fields.clear();
      fields.str(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw MeshError(fmt::format("mesh file line {}: {}", line_no, what));
  }
};

template <typename T>
T take(std::istringstream& fields, LineReader& reader, const char* name) {
  T v{};
  if (!(fields >> v)) reader.fail(fmt::format("expected {}", name));
  return v;
}

Vec3 take_vec(std::istringstream& fields, LineReader& reader, int dim, const char* name) {
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < dim; ++a) v[a] = take<double>(fields, reader, name);
  return v;
}

void expect_end(std::istringstream& fields, LineReader& reader) {
  std::string extra;
  if (fields >> extra) reader.fail(fmt::format("unexpected trailing token '{}'", extra));
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  LineReader reader{in};
  std::istringstream fields;

  if (!reader.next(fields)) throw MeshError("mesh file is empty");
  std::string magic;
  int version = 0;
  fields >> magic >> version;
  if (magic != "fvgw-mesh" || version != 1) reader.fail("expected header 'fvgw-mesh 1'");

  int dim = 0;
  std::optional<double> domain_volume;
  std::vector<Cell> cells;
  std::vector<InteriorFace> interior;
  std::vector<BoundaryFace> boundary;

  while (reader.next(fields)) {
    std::string kind;
    fields >> kind;
    if (kind == "dimension") {
      dim = take<int>(fields, reader, "dimension");
      if (dim != 2 && dim != 3) reader.fail("dimension must be 2 or 3");
    } else if (kind == "domain_volume") {
      domain_volume = take<double>(fields, reader, "domain volume");
    } else {
      if (dim == 0) reader.fail("'dimension' must precede cell and face records");
      if (kind == "cell") {
        Cell c;
        c.id = take<Index>(fields, reader, "cell id");
        c.center = take_vec(fields, reader, dim, "cell center");
        c.volume = take<double>(fields, reader, "cell volume");
        c.diameter = take<double>(fields, reader, "cell diameter");
        cells.push_back(std::move(c));
      } else if (kind == "iface") {
        InteriorFace f;
        f.left = take<Index>(fields, reader, "left cell");
        f.right = take<Index>(fields, reader, "right cell");
        f.area = take<double>(fields, reader, "face area");
        f.center_distance = take<double>(fields, reader, "center distance");
        f.left_distance = take<double>(fields, reader, "left face distance");
        f.normal = take_vec(fields, reader, dim, "normal");
        interior.push_back(f);
      } else if (kind == "bface") {
        BoundaryFace f;
        f.cell = take<Index>(fields, reader, "cell");
        f.area = take<double>(fields, reader, "face area");
        f.center_distance = take<double>(fields, reader, "face distance");
        f.normal = take_vec(fields, reader, dim, "normal");
        const auto tag_text = take<std::string>(fields, reader, "boundary tag");
        const auto tag = parse_boundary_tag(tag_text);
        if (!tag) reader.fail(fmt::format("unknown boundary tag '{}'", tag_text));
        f.tag = *tag;
        boundary.push_back(f);
      } else {
        reader.fail(fmt::format("unknown record '{}'", kind));
      }
    }
    expect_end(fields, reader);
  }
  if (dim == 0) throw MeshError("mesh file has no 'dimension' record");
  return Mesh(dim, std::move(cells), std::move(interior), std::move(boundary), domain_volume);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError(fmt::format("cannot open mesh file '{}'", path));
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  const int dim = mesh.dimension();
  auto vec = [dim](const Vec3& v) {
    std::string s;
    for (int a = 0; a < dim; ++a) s += fmt::format(" {:.17g}", v[a]);
    return s;
  };
  fmt::print(out, "fvgw-mesh 1\ndimension {}\ndomain_volume {:.17g}\n", dim, mesh.domain_volume());
  for (const Cell& c : mesh.cells())
    fmt::print(out, "cell {}{} {:.17g} {:.17g}\n", c.id, vec(c.center), c.volume, c.diameter);
  for (const InteriorFace& f : mesh.interior_faces())
    fmt::print(out, "iface {} {} {:.17g} {:.17g} {:.17g}{}\n", f.left, f.right, f.area, f.center_distance,
               f.left_distance, vec(f.normal));
  for (const BoundaryFace& f : mesh.boundary_faces())
    fmt::print(out, "bface {} {:.17g} {:.17g}{} {}\n", f.cell, f.area, f.center_distance, vec(f.normal),
               to_string(f.tag));
}

}  // namespace fvgw
