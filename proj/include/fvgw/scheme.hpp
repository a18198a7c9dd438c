#pragma once

// Fully implicit residual of one time step: gas and water equations per
// cell, two-point capillary fluxes, upwind convection and gravity fluxes,
// ghost values on the water-injection boundary.

#include "fvgw/fluxes.hpp"
#include "fvgw/mesh.hpp"
#include "fvgw/physics.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace fvgw {

class SchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct State {
  CellField p;
  CellField s;

  Index size() const { return p.size(); }
};

/// Interleaved (p_K, s_K) packing.
Eigen::VectorXd pack(const State& state);
State unpack(const Eigen::VectorXd& u);

struct GaussianBump {
  Vec3 center = Vec3::Zero();
  double amplitude = 0.0;
  double width = 1.0;
};

struct BoxValue {
  Box box;
  double value = 0.0;
};

/// base + gradient . x + sum of Gaussian bumps; a point inside one of the
/// boxes takes that box's value instead (last box wins). An optional time
/// window [start, stop) zeroes the field outside it.
struct FieldSpec {
  double base = 0.0;
  Vec3 gradient = Vec3::Zero();
  std::vector<GaussianBump> bumps;
  std::vector<BoxValue> boxes;
  std::optional<std::pair<double, double>> window;

  static FieldSpec constant(double value) {
    FieldSpec f;
    f.base = value;
    return f;
  }

  double operator()(const Vec3& x) const;
  double operator()(double t, const Vec3& x) const;
  bool is_zero() const;
  /// Lower bound of the field ignoring the window (used for the H5 check).
  double sampled_minimum(const Mesh& mesh) const;
};

struct SourceModel {
  FieldSpec production;  // f_P
  FieldSpec injection;   // f_I
};

/// Throws SchemeError if f_P or f_I is negative at a sample point (H5).
void validate_sources(const Mesh& mesh, const SourceModel& sources);

/// (1/|K|) int_K f by a composite midpoint rule (4 points per direction) on
/// lattice cells; the center value otherwise. Exact for affine f.
double cell_average(const Mesh& mesh, Index cell, const std::function<double(const Vec3&)>& f);

/// (1/(dt |K|)) int_{t0}^{t1} int_K f by composite midpoint rules.
double cell_source_avg(const Mesh& mesh, const std::function<double(double, const Vec3&)>& f, Index cell,
                       double t0, double t1);

State project_initial(const Mesh& mesh, const std::function<double(const Vec3&)>& p0,
                      const std::function<double(const Vec3&)>& s0);

struct DirichletData {
  double pressure = 0.0;
  double saturation = 0.0;
};

/// Quantities frozen for one step: old state, dt and averaged sources.
struct StepData {
  State old;
  double t0 = 0.0;
  double dt = 1.0;
  CellField production;
  CellField injection;
};

struct SchemeResidual {
  CellField gas;
  CellField water;
  bool scaled = true;  // divided by |K|
};

/// Per-step water balance pieces, unscaled.
struct WaterBalance {
  double accumulation = 0.0;  // sum |K| phi (s - s_old) / dt
  double boundary = 0.0;      // net flux through Gamma_w faces
  double sources = 0.0;       // sum |K| ((s - 1) f_P + f_I)
  double interior = 0.0;      // sum of interior face fluxes (telescopes to 0)
};

class Discretization {
 public:
  Discretization(const Mesh& mesh, const FluidModel& model, DirichletData boundary = {}, SourceModel sources = {});
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const Mesh& mesh() const { return *mesh_; }
  const DerivedFunctions& functions() const { return functions_; }
  const FluxKernel& kernel() const { return kernel_; }
  const FluidModel& model() const { return model_; }
  const DirichletData& boundary() const { return boundary_; }
  const SourceModel& sources() const { return sources_; }
  Index num_cells() const { return mesh_->num_cells(); }
  Index num_unknowns() const { return 2 * mesh_->num_cells(); }

  StepData prepare(const State& old, double t0, double dt) const;

  /// Scaled residual at the packed iterate u.
  Eigen::VectorXd residual(const StepData& step, const Eigen::VectorXd& u) const;
  /// Same, skipping interior faces (used by conservativity checks).
  Eigen::VectorXd residual_without_interior(const StepData& step, const Eigen::VectorXd& u) const;

  /// Exact Jacobian by forward-mode automatic differentiation.
  Eigen::SparseMatrix<double> jacobian(const StepData& step, const Eigen::VectorXd& u) const;
  /// Forward differences with step max(1e-7, 1e-7 |u_j|), one residual
  /// evaluation per color of a distance-2 coloring of the cell graph.
  Eigen::SparseMatrix<double> jacobian_fd(const StepData& step, const Eigen::VectorXd& u) const;
  int num_colors() const { return num_colors_; }

  WaterBalance water_balance(const StepData& step, const State& state) const;

  // Face coefficients: d* tau for interior faces, k_K tau for Gamma_w faces.
  const std::vector<double>& interior_coefficients() const { return interior_coef_; }
  const std::vector<double>& dirichlet_coefficients() const { return dirichlet_coef_; }

 private:
  template <typename T>
  std::pair<T, T> face_flux(Index face, const T& pK, const T& sK, const T& pL, const T& sL) const;
  template <typename T>
  std::pair<T, T> boundary_flux(Index slot, const T& pK, const T& sK) const;
  template <typename T>
  std::pair<T, T> cell_terms(const StepData& step, Index cell, const T& p, const T& s) const;

  void assemble(const StepData& step, const Eigen::VectorXd& u, Eigen::VectorXd& r, bool interior) const;
  void check_finite(const Eigen::VectorXd& u) const;

  const Mesh* mesh_;
  FluidModel model_;
  DerivedFunctions functions_;
  FluxKernel kernel_;
  DirichletData boundary_;
  SourceModel sources_;
  CellField porosity_;
  std::vector<double> interior_coef_;
  std::vector<FaceGravity> interior_gravity_;
  std::vector<double> dirichlet_coef_;
  std::vector<FaceGravity> dirichlet_gravity_;
  std::vector<int> color_;
  int num_colors_ = 0;
};

/// Residual split into gas and water parts at (old, new).
SchemeResidual assemble_residual(const Discretization& disc, const State& old_state, const State& new_state,
                                 double dt, double t0);

}  // namespace fvgw
