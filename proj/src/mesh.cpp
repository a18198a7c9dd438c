#include "fvgw/mesh.hpp"

#include <Eigen/Geometry>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fvgw {

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::water_injection:
      return "water_injection";
    case BoundaryTag::impervious:
      return "impervious";
  }
  return "impervious";
}

std::optional<BoundaryTag> parse_boundary_tag(std::string_view text) {
  if (text == "water_injection") return BoundaryTag::water_injection;
  if (text == "impervious") return BoundaryTag::impervious;
  return std::nullopt;
}

Vec3 Lattice::spacing() const {
  Vec3 h = Vec3::Zero();
  for (int a = 0; a < 3; ++a) h[a] = (extent.upper[a] - extent.lower[a]) / static_cast<double>(counts[a]);
  return h;
}

std::array<Index, 3> Lattice::cell_coords(Index cell) const {
  const Index i = cell % counts[0];
  const Index j = (cell / counts[0]) % counts[1];
  const Index k = cell / (counts[0] * counts[1]);
  return {i, j, k};
}

Box Lattice::cell_box(Index cell) const {
  const auto ijk = cell_coords(cell);
  const Vec3 h = spacing();
  Box b;
  for (int a = 0; a < 3; ++a) {
    b.lower[a] = extent.lower[a] + h[a] * static_cast<double>(ijk[a]);
    b.upper[a] = (ijk[a] + 1 == counts[a]) ? extent.upper[a] : b.lower[a] + h[a];
  }
  return b;
}

namespace {

constexpr double kUnitTolerance = 1e-14;

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

Mesh::Mesh(int dimension, std::vector<Cell> cells, std::vector<InteriorFace> interior_faces,
           std::vector<BoundaryFace> boundary_faces, std::optional<double> domain_volume,
           std::optional<Lattice> lattice)
    : dimension_(dimension),
      cells_(std::move(cells)),
      interior_faces_(std::move(interior_faces)),
      boundary_faces_(std::move(boundary_faces)),
      lattice_(std::move(lattice)) {
  if (dimension_ != 2 && dimension_ != 3) throw MeshError(fmt::format("unsupported dimension {}", dimension_));
  if (cells_.empty()) throw MeshError("mesh has no cells");

  const Index n = num_cells();
  for (Index k = 0; k < n; ++k) {
    Cell& c = cells_[static_cast<std::size_t>(k)];
    if (c.id != k) throw MeshError(fmt::format("cell ids must be 0..n-1 in order (found {} at {})", c.id, k));
    if (!(c.volume > 0.0) || !std::isfinite(c.volume)) throw MeshError(fmt::format("cell {} has nonpositive volume", k));
    if (!(c.diameter > 0.0) || !std::isfinite(c.diameter)) throw MeshError(fmt::format("cell {} has nonpositive diameter", k));
    if (!finite(c.center)) throw MeshError(fmt::format("cell {} has a non-finite center", k));
    c.interior_faces.clear();
    c.boundary_faces.clear();
  }

  const double d = static_cast<double>(dimension_);
  for (std::size_t f = 0; f < interior_faces_.size(); ++f) {
    InteriorFace& face = interior_faces_[f];
    if (face.left < 0 || face.left >= n || face.right < 0 || face.right >= n || face.left == face.right)
      throw MeshError(fmt::format("interior face {} has invalid cells ({}, {})", f, face.left, face.right));
    if (!(face.area > 0.0) || !(face.center_distance > 0.0))
      throw MeshError(fmt::format("interior face {} has nonpositive area or distance", f));
    if (!(face.left_distance > 0.0) || !(face.left_distance < face.center_distance))
      throw MeshError(fmt::format("interior face {} has inconsistent face distances", f));
    if (!finite(face.normal) || std::abs(face.normal.norm() - 1.0) > kUnitTolerance)
      throw MeshError(fmt::format("interior face {} normal is not a unit vector", f));
    face.diamond_measure = face.area * face.center_distance / d;
    cells_[static_cast<std::size_t>(face.left)].interior_faces.push_back(static_cast<Index>(f));
    cells_[static_cast<std::size_t>(face.right)].interior_faces.push_back(static_cast<Index>(f));
  }

  for (std::size_t f = 0; f < boundary_faces_.size(); ++f) {
    BoundaryFace& face = boundary_faces_[f];
    if (face.cell < 0 || face.cell >= n) throw MeshError(fmt::format("boundary face {} has invalid cell {}", f, face.cell));
    if (!(face.area > 0.0) || !(face.center_distance > 0.0))
      throw MeshError(fmt::format("boundary face {} has nonpositive area or distance", f));
    if (!finite(face.normal) || std::abs(face.normal.norm() - 1.0) > kUnitTolerance)
      throw MeshError(fmt::format("boundary face {} normal is not a unit vector", f));
    face.diamond_measure = face.area * face.center_distance / d;
    cells_[static_cast<std::size_t>(face.cell)].boundary_faces.push_back(static_cast<Index>(f));
    if (face.tag == BoundaryTag::water_injection) dirichlet_faces_.push_back(static_cast<Index>(f));
  }

  // Pairwise distinct centers: sort lexicographically, compare neighbours.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto lex = [&](Index a, Index b) {
    const Vec3& x = cells_[static_cast<std::size_t>(a)].center;
    const Vec3& y = cells_[static_cast<std::size_t>(b)].center;
    return std::lexicographical_compare(x.data(), x.data() + 3, y.data(), y.data() + 3);
  };
  std::sort(order.begin(), order.end(), lex);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (cells_[static_cast<std::size_t>(order[i])].center == cells_[static_cast<std::size_t>(order[i - 1])].center)
      throw MeshError(fmt::format("cells {} and {} share a center", order[i - 1], order[i]));
  }

  const double total = volumes().sum();
  domain_volume_ = domain_volume.value_or(total);
  if (std::abs(total - domain_volume_) > 1e-12 * domain_volume_)
    throw MeshError(fmt::format("cell volumes sum to {} but the domain measure is {}", total, domain_volume_));

  size_ = 0.0;
  for (const Cell& c : cells_) size_ = std::max(size_, c.diameter);

  regularity_ = std::numeric_limits<double>::infinity();
  for (const InteriorFace& face : interior_faces_) {
    regularity_ = std::min(regularity_, face.center_distance / cell(face.left).diameter);
    regularity_ = std::min(regularity_, face.center_distance / cell(face.right).diameter);
  }
  for (const BoundaryFace& face : boundary_faces_)
    regularity_ = std::min(regularity_, face.center_distance / cell(face.cell).diameter);

  if (lattice_) {
    bounding_box_ = lattice_->extent;
  } else {
    bounding_box_.lower = Vec3::Constant(std::numeric_limits<double>::infinity());
    bounding_box_.upper = -bounding_box_.lower;
    for (const Cell& c : cells_) {
      const Vec3 r = Vec3::Constant(0.5 * c.diameter);
      bounding_box_.lower = bounding_box_.lower.cwiseMin(c.center - r);
      bounding_box_.upper = bounding_box_.upper.cwiseMax(c.center + r);
    }
    if (dimension_ == 2) bounding_box_.lower.z() = bounding_box_.upper.z() = 0.0;
  }
}

Eigen::VectorXd Mesh::volumes() const {
  Eigen::VectorXd v(num_cells());
  for (Index k = 0; k < num_cells(); ++k) v[k] = cell(k).volume;
  return v;
}

Mesh build_rect_mesh(const RectMeshSpec& spec) {
  const int dim = spec.dimension;
  if (dim != 2 && dim != 3) throw MeshError(fmt::format("unsupported dimension {}", dim));
  std::array<Index, 3> counts = spec.counts;
  if (dim == 2) counts[2] = 1;
  for (int a = 0; a < dim; ++a) {
    if (counts[a] < 1) throw MeshError("cell counts must be at least 1 in every direction");
    if (!(spec.extent.upper[a] > spec.extent.lower[a])) throw MeshError("mesh extent is degenerate");
  }
  for (int side = 0; side < 2 * dim; ++side) {
    if (!spec.tags[static_cast<std::size_t>(side)])
      throw MeshError(fmt::format("boundary side {} has no tag", side));
  }

  Lattice lattice;
  lattice.counts = counts;
  lattice.extent = spec.extent;
  if (dim == 2) {
    lattice.extent.lower.z() = 0.0;
    lattice.extent.upper.z() = 0.0;
  }
  Vec3 h = lattice.spacing();
  if (dim == 2) h.z() = 1.0;  // unit thickness for measures

  const double volume = (dim == 2) ? h.x() * h.y() : h.x() * h.y() * h.z();
  const double diameter = (dim == 2) ? std::hypot(h.x(), h.y()) : h.norm();
  std::array<double, 3> face_area{};
  face_area[0] = (dim == 2) ? h.y() : h.y() * h.z();
  face_area[1] = (dim == 2) ? h.x() : h.x() * h.z();
  face_area[2] = h.x() * h.y();

  const Index n = counts[0] * counts[1] * counts[2];
  std::vector<Cell> cells(static_cast<std::size_t>(n));
  for (Index k = 0; k < counts[2]; ++k)
    for (Index j = 0; j < counts[1]; ++j)
      for (Index i = 0; i < counts[0]; ++i) {
        const Index id = lattice.cell_index(i, j, k);
        Cell& c = cells[static_cast<std::size_t>(id)];
        c.id = id;
        c.center = Vec3(spec.extent.lower.x() + (static_cast<double>(i) + 0.5) * h.x(),
                        spec.extent.lower.y() + (static_cast<double>(j) + 0.5) * h.y(),
                        dim == 3 ? spec.extent.lower.z() + (static_cast<double>(k) + 0.5) * h.z() : 0.0);
        c.volume = volume;
        c.diameter = diameter;
      }

  std::vector<InteriorFace> interior;
  std::vector<BoundaryFace> boundary;
  for (Index k = 0; k < counts[2]; ++k)
    for (Index j = 0; j < counts[1]; ++j)
      for (Index i = 0; i < counts[0]; ++i) {
        const Index id = lattice.cell_index(i, j, k);
        const std::array<Index, 3> ijk{i, j, k};
        for (int a = 0; a < dim; ++a) {
          Vec3 e = Vec3::Zero();
          e[a] = 1.0;
          if (ijk[a] + 1 < counts[a]) {
            std::array<Index, 3> nb = ijk;
            ++nb[a];
            InteriorFace f;
            f.left = id;
            f.right = lattice.cell_index(nb[0], nb[1], nb[2]);
            f.area = face_area[a];
            f.center_distance = h[a];
            f.left_distance = 0.5 * h[a];
            f.normal = e;
            interior.push_back(f);
          }
          if (ijk[a] == 0 || ijk[a] + 1 == counts[a]) {
            for (int hi = 0; hi < 2; ++hi) {
              if ((hi == 0 && ijk[a] != 0) || (hi == 1 && ijk[a] + 1 != counts[a])) continue;
              BoundaryFace b;
              b.cell = id;
              b.area = face_area[a];
              b.center_distance = 0.5 * h[a];
              b.normal = hi ? e : Vec3(-e);
              b.tag = *spec.tags[static_cast<std::size_t>(2 * a + hi)];
              boundary.push_back(b);
            }
          }
        }
      }

  double measure = 1.0;
  for (int a = 0; a < dim; ++a) measure *= spec.extent.upper[a] - spec.extent.lower[a];
  return Mesh(dim, std::move(cells), std::move(interior), std::move(boundary), measure, lattice);
}

Mesh build_rect_mesh(Index nx, Index ny, const Box& extent, const SideTags& tags) {
  RectMeshSpec spec;
  spec.dimension = 2;
  spec.counts = {nx, ny, 1};
  spec.extent = extent;
  spec.tags = tags;
  return build_rect_mesh(spec);
}

AdmissibilityReport check_admissibility(const Mesh& mesh) {
  AdmissibilityReport report;
  for (const InteriorFace& f : mesh.interior_faces()) {
    const Vec3 v = mesh.cell(f.right).center - mesh.cell(f.left).center;
    const double angle = std::atan2(v.cross(f.normal).norm(), v.dot(f.normal));
    report.orthogonality_defect = std::max(report.orthogonality_defect, std::abs(angle));
  }
  report.regularity = mesh.regularity();
  report.pass = report.orthogonality_defect < kOrthogonalityTolerance && report.regularity > 0.0;
  return report;
}

namespace {

void require_cell_field(const Mesh& mesh, const CellField& u, const char* what) {
  if (u.size() != mesh.num_cells())
    throw MeshError(fmt::format("{}: expected {} cell values, got {}", what, mesh.num_cells(), u.size()));
}

}  // namespace

DiamondField discrete_gradient(const Mesh& mesh, const CellField& u, double dirichlet_value) {
  require_cell_field(mesh, u, "discrete_gradient");
  const int d = mesh.dimension();
  const double l = static_cast<double>(d);
  DiamondField grad(mesh.num_diamonds(), d);
  Index row = 0;
  for (const InteriorFace& f : mesh.interior_faces()) {
    const double jump = l * (u[f.right] - u[f.left]) / f.center_distance;
    grad.row(row++) = jump * f.normal.head(d).transpose();
  }
  for (Index bf : mesh.dirichlet_faces()) {
    const BoundaryFace& f = mesh.boundary_faces()[static_cast<std::size_t>(bf)];
    const double jump = l * (dirichlet_value - u[f.cell]) / f.center_distance;
    grad.row(row++) = jump * f.normal.head(d).transpose();
  }
  return grad;
}

CellField discrete_divergence(const Mesh& mesh, const Eigen::MatrixXd& face_field,
                              const Eigen::MatrixXd* boundary_flux) {
  const int d = mesh.dimension();
  if (face_field.rows() != mesh.num_interior_faces() || face_field.cols() != d)
    throw MeshError("discrete_divergence: face field has the wrong shape");
  const auto n_dir = static_cast<Index>(mesh.dirichlet_faces().size());
  if (boundary_flux && (boundary_flux->rows() != n_dir || boundary_flux->cols() != d))
    throw MeshError("discrete_divergence: boundary flux has the wrong shape");

  CellField div = CellField::Zero(mesh.num_cells());
  for (Index fi = 0; fi < mesh.num_interior_faces(); ++fi) {
    const InteriorFace& f = mesh.interior_faces()[static_cast<std::size_t>(fi)];
    const double flux = f.area * face_field.row(fi).dot(f.normal.head(d));
    div[f.left] += flux;
    div[f.right] -= flux;
  }
  if (boundary_flux) {
    for (Index b = 0; b < n_dir; ++b) {
      const BoundaryFace& f = mesh.boundary_faces()[static_cast<std::size_t>(mesh.dirichlet_faces()[static_cast<std::size_t>(b)])];
      div[f.cell] += f.area * boundary_flux->row(b).dot(f.normal.head(d));
    }
  }
  for (Index k = 0; k < mesh.num_cells(); ++k) div[k] /= mesh.cell(k).volume;
  return div;
}

DualityCheck duality_defect(const Mesh& mesh, const CellField& w, const DiamondField& field) {
  require_cell_field(mesh, w, "duality_defect");
  const int d = mesh.dimension();
  if (field.rows() != mesh.num_diamonds() || field.cols() != d)
    throw MeshError("duality_defect: field does not match the diamond layout");

  const Index n_int = mesh.num_interior_faces();
  const Eigen::MatrixXd interior = field.topRows(n_int);
  const Eigen::MatrixXd boundary = field.bottomRows(mesh.num_diamonds() - n_int);
  const CellField div = discrete_divergence(mesh, interior, &boundary);
  const DiamondField grad = discrete_gradient(mesh, w, 0.0);

  DualityCheck out;
  double sum = 0.0;
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const double term = mesh.cell(k).volume * w[k] * div[k];
    sum += term;
    out.scale += std::abs(term);
  }
  Index row = 0;
  for (const InteriorFace& f : mesh.interior_faces()) {
    const double term = f.diamond_measure * grad.row(row).dot(field.row(row));
    sum += term;
    out.scale += std::abs(term);
    ++row;
  }
  for (Index bf : mesh.dirichlet_faces()) {
    const BoundaryFace& f = mesh.boundary_faces()[static_cast<std::size_t>(bf)];
    const double term = f.diamond_measure * grad.row(row).dot(field.row(row));
    sum += term;
    out.scale += std::abs(term);
    ++row;
  }
  out.defect = std::abs(sum);
  return out;
}

double h_norm(const Mesh& mesh, const CellField& u, double dirichlet_value) {
  require_cell_field(mesh, u, "h_norm");
  // Each interface enters once; the leading factor is the space dimension.
  const double l = static_cast<double>(mesh.dimension());
  double sum = 0.0;
  for (const InteriorFace& f : mesh.interior_faces()) {
    const double jump = u[f.right] - u[f.left];
    sum += f.transmissibility() * jump * jump;
  }
  for (Index bf : mesh.dirichlet_faces()) {
    const BoundaryFace& f = mesh.boundary_faces()[static_cast<std::size_t>(bf)];
    const double jump = dirichlet_value - u[f.cell];
    sum += f.transmissibility() * jump * jump;
  }
  return std::sqrt(l * sum);
}

double l2_norm(const Mesh& mesh, const CellField& u) {
  require_cell_field(mesh, u, "l2_norm");
  double sum = 0.0;
  for (Index k = 0; k < mesh.num_cells(); ++k) sum += mesh.cell(k).volume * u[k] * u[k];
  return std::sqrt(sum);
}

double diamond_l2_norm(const Mesh& mesh, const DiamondField& field) {
  if (field.rows() != mesh.num_diamonds()) throw MeshError("diamond_l2_norm: wrong number of rows");
  double sum = 0.0;
  Index row = 0;
  for (const InteriorFace& f : mesh.interior_faces()) sum += f.diamond_measure * field.row(row++).squaredNorm();
  for (Index bf : mesh.dirichlet_faces())
    sum += mesh.boundary_faces()[static_cast<std::size_t>(bf)].diamond_measure * field.row(row++).squaredNorm();
  return std::sqrt(sum);
}

}  // namespace fvgw
