#pragma once

// Admissible orthogonal meshes and the two-point discrete calculus built on
// them: diamond-wise gradient, cell-wise divergence, the H_h inner product.

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fvgw {

using Index = Eigen::Index;
using Vec3 = Eigen::Vector3d;

/// One scalar per cell.
using CellField = Eigen::VectorXd;

/// One d-vector per diamond, stored row-wise: interior faces first, then the
/// Dirichlet (water injection) boundary faces in Mesh::dirichlet_faces order.
using DiamondField = Eigen::MatrixXd;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BoundaryTag { water_injection, impervious };

std::string_view to_string(BoundaryTag tag);
std::optional<BoundaryTag> parse_boundary_tag(std::string_view text);

struct Cell {
  Index id = 0;
  Vec3 center = Vec3::Zero();
  double volume = 0.0;
  double diameter = 0.0;
  std::vector<Index> interior_faces;
  std::vector<Index> boundary_faces;
};

struct InteriorFace {
  Index left = 0;   // K
  Index right = 0;  // L
  double area = 0.0;
  double center_distance = 0.0;  // d_{K,L}
  double left_distance = 0.0;    // d(x_K, sigma)
  Vec3 normal = Vec3::UnitX();   // eta_{K,L}, oriented K -> L
  double diamond_measure = 0.0;  // |sigma| d_{K,L} / d

  double right_distance() const { return center_distance - left_distance; }
  double transmissibility() const { return area / center_distance; }
};

struct BoundaryFace {
  Index cell = 0;
  double area = 0.0;
  double center_distance = 0.0;  // d_{K,sigma}
  Vec3 normal = Vec3::UnitX();   // outward
  BoundaryTag tag = BoundaryTag::impervious;
  double diamond_measure = 0.0;

  double transmissibility() const { return area / center_distance; }
};

struct Box {
  Vec3 lower = Vec3::Zero();
  Vec3 upper = Vec3::Ones();
};

/// Structured-grid metadata kept by the rectangular generator. Cell index is
/// i + nx * (j + ny * k).
struct Lattice {
  std::array<Index, 3> counts{1, 1, 1};
  Box extent;

  Vec3 spacing() const;
  Index cell_index(Index i, Index j, Index k = 0) const {
    return i + counts[0] * (j + counts[1] * k);
  }
  std::array<Index, 3> cell_coords(Index cell) const;
  Box cell_box(Index cell) const;
};

class Mesh {
 public:
  /// Validates structure (positive measures, unit normals, consistent face
  /// references, distinct centers). Orthogonality is checked separately by
  /// check_admissibility.
  Mesh(int dimension, std::vector<Cell> cells, std::vector<InteriorFace> interior_faces,
       std::vector<BoundaryFace> boundary_faces, std::optional<double> domain_volume = {},
       std::optional<Lattice> lattice = {});

  int dimension() const { return dimension_; }
  Index num_cells() const { return static_cast<Index>(cells_.size()); }
  Index num_interior_faces() const { return static_cast<Index>(interior_faces_.size()); }
  Index num_boundary_faces() const { return static_cast<Index>(boundary_faces_.size()); }
  Index num_diamonds() const { return num_interior_faces() + static_cast<Index>(dirichlet_faces_.size()); }

  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(Index k) const { return cells_[static_cast<std::size_t>(k)]; }
  const std::vector<InteriorFace>& interior_faces() const { return interior_faces_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }
  /// Indices into boundary_faces() of the faces tagged water_injection.
  const std::vector<Index>& dirichlet_faces() const { return dirichlet_faces_; }

  /// h = max cell diameter.
  double size() const { return size_; }
  /// min over cell/face pairs of d_{K,.}/diam(K).
  double regularity() const { return regularity_; }
  double domain_volume() const { return domain_volume_; }
  const Box& bounding_box() const { return bounding_box_; }
  double domain_diameter() const { return (bounding_box_.upper - bounding_box_.lower).norm(); }
  const std::optional<Lattice>& lattice() const { return lattice_; }

  Eigen::VectorXd volumes() const;

 private:
  int dimension_;
  std::vector<Cell> cells_;
  std::vector<InteriorFace> interior_faces_;
  std::vector<BoundaryFace> boundary_faces_;
  std::vector<Index> dirichlet_faces_;
  double size_ = 0.0;
  double regularity_ = 0.0;
  double domain_volume_ = 0.0;
  Box bounding_box_;
  std::optional<Lattice> lattice_;
};

/// Sides ordered west (x-), east (x+), south (y-), north (y+), bottom (z-), top (z+).
using SideTags = std::array<std::optional<BoundaryTag>, 6>;

struct RectMeshSpec {
  int dimension = 2;
  std::array<Index, 3> counts{1, 1, 1};
  Box extent;
  SideTags tags{};
};

Mesh build_rect_mesh(const RectMeshSpec& spec);

/// Convenience overload for 2-D strips and boxes.
Mesh build_rect_mesh(Index nx, Index ny, const Box& extent, const SideTags& tags);

struct AdmissibilityReport {
  double orthogonality_defect = 0.0;  // radians
  double regularity = 0.0;
  bool pass = false;
};

inline constexpr double kOrthogonalityTolerance = 1e-10;

AdmissibilityReport check_admissibility(const Mesh& mesh);

DiamondField discrete_gradient(const Mesh& mesh, const CellField& u, double dirichlet_value = 0.0);

/// div_K F = (1/|K|) sum_L |sigma_{K,L}| F_{K,L} . eta_{K,L}. F has one row per
/// interior face; boundary_flux (optional) one row per Dirichlet face.
CellField discrete_divergence(const Mesh& mesh, const Eigen::MatrixXd& face_field,
                              const Eigen::MatrixXd* boundary_flux = nullptr);

struct DualityCheck {
  double defect = 0.0;
  double scale = 0.0;
};

/// |sum_K |K| w_K div_K F + sum_T |T| grad w . F| with zero Dirichlet data for
/// w. F is laid out as a DiamondField (interior rows, then Dirichlet rows).
DualityCheck duality_defect(const Mesh& mesh, const CellField& w, const DiamondField& field);

/// <u,u>_{H_h}^{1/2}, including the Dirichlet boundary sum.
double h_norm(const Mesh& mesh, const CellField& u, double dirichlet_value = 0.0);

double l2_norm(const Mesh& mesh, const CellField& u);

/// L^2 norm of a diamond-wise constant vector field.
double diamond_l2_norm(const Mesh& mesh, const DiamondField& field);

// Plain-text mesh exchange format, see docs/mesh-format.md.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace fvgw
