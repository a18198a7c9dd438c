#include "fvgw/scheme.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fvgw {

Eigen::VectorXd pack(const State& state) {
  Eigen::VectorXd u(2 * state.size());
  for (Index k = 0; k < state.size(); ++k) {
    u[2 * k] = state.p[k];
    u[2 * k + 1] = state.s[k];
  }
  return u;
}

State unpack(const Eigen::VectorXd& u) {
  const Index n = u.size() / 2;
  State st{CellField(n), CellField(n)};
  for (Index k = 0; k < n; ++k) {
    st.p[k] = u[2 * k];
    st.s[k] = u[2 * k + 1];
  }
  return st;
}

// ---------------------------------------------------------------------------
// Fields, averages and sources

namespace {

bool inside(const Box& b, const Vec3& x) {
  return (x.array() >= b.lower.array()).all() && (x.array() <= b.upper.array()).all();
}

constexpr int kSpacePoints = 4;

template <class F>
void for_each_sample(const Mesh& mesh, Index cell, F&& visit) {
  const auto& lat = mesh.lattice();
  if (!lat) {
    visit(mesh.cell(cell).center, 1.0);
    return;
  }
  const Box b = lat->cell_box(cell);
  const int dim = mesh.dimension();
  const int nz = dim == 3 ? kSpacePoints : 1;
  const double w = 1.0 / (kSpacePoints * kSpacePoints * nz);
  Vec3 x = mesh.cell(cell).center;
  for (int k = 0; k < nz; ++k) {
    if (dim == 3) x[2] = b.lower[2] + (k + 0.5) / kSpacePoints * (b.upper[2] - b.lower[2]);
    for (int j = 0; j < kSpacePoints; ++j) {
      x[1] = b.lower[1] + (j + 0.5) / kSpacePoints * (b.upper[1] - b.lower[1]);
      for (int i = 0; i < kSpacePoints; ++i) {
        x[0] = b.lower[0] + (i + 0.5) / kSpacePoints * (b.upper[0] - b.lower[0]);
        visit(x, w);
      }
    }
  }
}

}  // namespace

double FieldSpec::operator()(const Vec3& x) const {
  for (auto it = boxes.rbegin(); it != boxes.rend(); ++it)
    if (inside(it->box, x)) return it->value;
  double v = base + gradient.dot(x);
  for (const auto& g : bumps) v += g.amplitude * std::exp(-(x - g.center).squaredNorm() / (g.width * g.width));
  return v;
}

double FieldSpec::operator()(double t, const Vec3& x) const {
  if (window && (t < window->first || t >= window->second)) return 0.0;
  return (*this)(x);
}

bool FieldSpec::is_zero() const {
  if (base != 0.0 || !gradient.isZero()) return false;
  for (const auto& g : bumps)
    if (g.amplitude != 0.0) return false;
  for (const auto& b : boxes)
    if (b.value != 0.0) return false;
  return true;
}

double FieldSpec::sampled_minimum(const Mesh& mesh) const {
  double lo = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    lo = std::min(lo, (*this)(mesh.cell(k).center));
    for_each_sample(mesh, k, [&](const Vec3& x, double) { lo = std::min(lo, (*this)(x)); });
  }
  return lo;
}

void validate_sources(const Mesh& mesh, const SourceModel& sources) {
  const double fp = sources.production.sampled_minimum(mesh);
  const double fi = sources.injection.sampled_minimum(mesh);
  if (fp < 0.0) throw SchemeError(fmt::format("production rate f_P takes the negative value {}", fp));
  if (fi < 0.0) throw SchemeError(fmt::format("injection rate f_I takes the negative value {}", fi));
}

double cell_average(const Mesh& mesh, Index cell, const std::function<double(const Vec3&)>& f) {
  // offsets from the center value keep constants exact
  const double center = f(mesh.cells()[cell].center);
  double acc = 0.0;
  for_each_sample(mesh, cell, [&](const Vec3& x, double w) { acc += w * (f(x) - center); });
  return center + acc;
}

double cell_source_avg(const Mesh& mesh, const std::function<double(double, const Vec3&)>& f, Index cell,
                       double t0, double t1) {
  if (!(t1 > t0)) throw SchemeError("cell_source_avg needs t1 > t0");
  double acc = 0.0;
  for (double frac : {0.25, 0.75}) {
    const double t = t0 + frac * (t1 - t0);
    acc += 0.5 * cell_average(mesh, cell, [&](const Vec3& x) { return f(t, x); });
  }
  return acc;
}

State project_initial(const Mesh& mesh, const std::function<double(const Vec3&)>& p0,
                      const std::function<double(const Vec3&)>& s0) {
  const Index n = mesh.num_cells();
  State st{CellField(n), CellField(n)};
  for (Index k = 0; k < n; ++k) {
    st.p[k] = cell_average(mesh, k, p0);
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    st.s[k] = cell_average(mesh, k, [&](const Vec3& x) {
      const double v = s0(x);
      smin = std::min(smin, v);
      smax = std::max(smax, v);
      return v;
    });
    if (smin < 0.0 || smax > 1.0)
      throw SchemeError(fmt::format("initial saturation leaves [0, 1] in cell {} (range [{}, {}])", k, smin, smax));
    if (!std::isfinite(st.p[k])) throw SchemeError(fmt::format("initial pressure is not finite in cell {}", k));
  }
  return st;
}

// ---------------------------------------------------------------------------
// Discretization

Discretization::Discretization(const Mesh& mesh, const FluidModel& model, DirichletData boundary,
                               SourceModel sources)
    : mesh_(&mesh),
      model_(model),
      functions_(model_),
      kernel_(functions_),
      boundary_(boundary),
      sources_(std::move(sources)) {
  const Index n = mesh.num_cells();
  porosity_ = model_.porosity.size() == 0 ? CellField::Ones(n) : model_.porosity;
  CellField k = model_.permeability.size() == 0 ? CellField::Ones(n) : model_.permeability;
  if (porosity_.size() != n || k.size() != n) throw SchemeError("porosity/permeability size differs from the mesh");
  for (Index c = 0; c < n; ++c)
    if (!(porosity_[c] > 0.0)) throw SchemeError(fmt::format("porosity must be positive (cell {})", c));
  validate_sources(mesh, sources_);

  for (const InteriorFace& f : mesh.interior_faces()) {
    const double dstar =
        harmonic_transmissibility(k[f.left], k[f.right], f.left_distance, f.right_distance(), f.center_distance);
    interior_coef_.push_back(dstar * f.transmissibility());
    interior_gravity_.push_back(face_gravity(model_.gravity, f.normal, f.area).scaled(dstar));
  }
  for (Index b : mesh.dirichlet_faces()) {
    const BoundaryFace& f = mesh.boundary_faces()[static_cast<std::size_t>(b)];
    const double kk = k[f.cell];
    if (!(kk > 0.0)) throw ModelError(fmt::format("permeability must be positive (cell {})", f.cell));
    dirichlet_coef_.push_back(kk * f.transmissibility());
    dirichlet_gravity_.push_back(face_gravity(model_.gravity, f.normal, f.area).scaled(kk));
  }

  // Greedy distance-2 coloring for the finite-difference Jacobian.
  std::vector<std::vector<Index>> nbrs(static_cast<std::size_t>(n));
  for (const InteriorFace& f : mesh.interior_faces()) {
    nbrs[static_cast<std::size_t>(f.left)].push_back(f.right);
    nbrs[static_cast<std::size_t>(f.right)].push_back(f.left);
  }
  color_.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> mark;
  for (Index c = 0; c < n; ++c) {
    mark.assign(static_cast<std::size_t>(num_colors_ + 1), 0);
    for (Index a : nbrs[static_cast<std::size_t>(c)]) {
      if (int col = color_[static_cast<std::size_t>(a)]; col >= 0) mark[static_cast<std::size_t>(col)] = 1;
      for (Index b : nbrs[static_cast<std::size_t>(a)])
        if (int col = color_[static_cast<std::size_t>(b)]; col >= 0 && b != c) mark[static_cast<std::size_t>(col)] = 1;
    }
    int col = 0;
    while (mark[static_cast<std::size_t>(col)]) ++col;
    color_[static_cast<std::size_t>(c)] = col;
    num_colors_ = std::max(num_colors_, col + 1);
  }
}

StepData Discretization::prepare(const State& old, double t0, double dt) const {
  if (!(dt > 0.0)) throw SchemeError("time step must be positive");
  const Index n = num_cells();
  StepData st{old, t0, dt, CellField::Zero(n), CellField::Zero(n)};
  if (!sources_.production.is_zero())
    for (Index k = 0; k < n; ++k) st.production[k] = cell_source_avg(*mesh_, sources_.production, k, t0, t0 + dt);
  if (!sources_.injection.is_zero())
    for (Index k = 0; k < n; ++k) st.injection[k] = cell_source_avg(*mesh_, sources_.injection, k, t0, t0 + dt);
  return st;
}

template <typename T>
std::pair<T, T> Discretization::face_flux(Index face, const T& pK, const T& sK, const T& pL, const T& sL) const {
  const double coef = interior_coef_[static_cast<std::size_t>(face)];
  const FaceGravity& g = interior_gravity_[static_cast<std::size_t>(face)];
  const T dp = coef * (pL - pK);
  const T rho = functions_.interface_density(pK, pL);
  const T cap = coef * (functions_.beta(sL) - functions_.beta(sK));
  T gas = rho * (kernel_.G1(sK, sL, dp) - cap) + gravity_flux_F1(functions_, pK, pL, sK, sL, g);
  T water = kernel_.G2(sK, sL, dp) - cap + gravity_flux_F2(functions_, sK, sL, g);
  return {gas, water};
}

template <typename T>
std::pair<T, T> Discretization::boundary_flux(Index slot, const T& pK, const T& sK) const {
  const double coef = dirichlet_coef_[static_cast<std::size_t>(slot)];
  const FaceGravity& g = dirichlet_gravity_[static_cast<std::size_t>(slot)];
  const T pD = constant_like(pK, boundary_.pressure);
  const T sD = constant_like(sK, boundary_.saturation);
  const T dp = coef * (pD - pK);
  const T rho = functions_.interface_density(pK, pD);
  const T cap = coef * (functions_.beta(sD) - functions_.beta(sK));
  T gas = rho * (kernel_.G1(sK, sD, dp) - cap) + gravity_flux_F1(functions_, pK, pD, sK, sD, g);
  T water = kernel_.G2(sK, sD, dp) - cap + gravity_flux_F2(functions_, sK, sD, g);
  return {gas, water};
}

template <typename T>
std::pair<T, T> Discretization::cell_terms(const StepData& step, Index cell, const T& p, const T& s) const {
  const double phi = porosity_[cell];
  const double fp = step.production[cell];
  const double fi = step.injection[cell];
  const double p_old = step.old.p[cell];
  const double s_old = step.old.s[cell];
  const T rho = functions_.density()(p);
  const double rho_old = functions_.density().value(p_old);
  T gas = phi * (rho * s - rho_old * s_old) / step.dt + rho * s * fp;
  T water = phi * (s - s_old) / step.dt + (s - 1.0) * fp + fi;
  return {gas, water};
}

void Discretization::check_finite(const Eigen::VectorXd& u) const {
  if (u.size() != num_unknowns())
    throw SchemeError(fmt::format("iterate has {} entries, expected {}", u.size(), num_unknowns()));
  for (Index i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i]))
      throw SchemeError(fmt::format("non-finite {} in cell {}", i % 2 == 0 ? "pressure" : "saturation", i / 2));
}

void Discretization::assemble(const StepData& step, const Eigen::VectorXd& u, Eigen::VectorXd& r,
                              bool interior) const {
  check_finite(u);
  const Mesh& mesh = *mesh_;
  r.setZero(num_unknowns());
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const auto [gas, water] = cell_terms(step, k, u[2 * k], u[2 * k + 1]);
    // cell terms are already per unit volume
    r[2 * k] += gas * mesh.cell(k).volume;
    r[2 * k + 1] += water * mesh.cell(k).volume;
  }
  if (interior) {
    const auto& faces = mesh.interior_faces();
    for (Index f = 0; f < mesh.num_interior_faces(); ++f) {
      const Index K = faces[static_cast<std::size_t>(f)].left;
      const Index L = faces[static_cast<std::size_t>(f)].right;
      const auto [gas, water] = face_flux(f, u[2 * K], u[2 * K + 1], u[2 * L], u[2 * L + 1]);
      r[2 * K] += gas;
      r[2 * K + 1] += water;
      r[2 * L] -= gas;
      r[2 * L + 1] -= water;
    }
  }
  const auto& dfaces = mesh.dirichlet_faces();
  for (std::size_t j = 0; j < dfaces.size(); ++j) {
    const Index K = mesh.boundary_faces()[static_cast<std::size_t>(dfaces[j])].cell;
    const auto [gas, water] = boundary_flux(static_cast<Index>(j), u[2 * K], u[2 * K + 1]);
    r[2 * K] += gas;
    r[2 * K + 1] += water;
  }
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const double inv = 1.0 / mesh.cell(k).volume;
    r[2 * k] *= inv;
    r[2 * k + 1] *= inv;
    if (!std::isfinite(r[2 * k]) || !std::isfinite(r[2 * k + 1]))
      throw SchemeError(fmt::format("residual is not finite in cell {}", k));
  }
}

Eigen::VectorXd Discretization::residual(const StepData& step, const Eigen::VectorXd& u) const {
  Eigen::VectorXd r;
  assemble(step, u, r, true);
  return r;
}

Eigen::VectorXd Discretization::residual_without_interior(const StepData& step, const Eigen::VectorXd& u) const {
  Eigen::VectorXd r;
  assemble(step, u, r, false);
  return r;
}

Eigen::SparseMatrix<double> Discretization::jacobian(const StepData& step, const Eigen::VectorXd& u) const {
  check_finite(u);
  const Mesh& mesh = *mesh_;
  using D4 = Dual<4>;
  using D2 = Dual<2>;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(4 * mesh.num_cells() + 16 * mesh.num_interior_faces()));
  auto inv = [&](Index k) { return 1.0 / mesh.cell(k).volume; };

  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const D2 p(u[2 * k], 2, 0), s(u[2 * k + 1], 2, 1);
    const auto [gas, water] = cell_terms(step, k, p, s);
    for (int j = 0; j < 2; ++j) {
      trip.emplace_back(2 * k, 2 * k + j, gas.derivatives()[j]);
      trip.emplace_back(2 * k + 1, 2 * k + j, water.derivatives()[j]);
    }
  }
  const auto& faces = mesh.interior_faces();
  for (Index f = 0; f < mesh.num_interior_faces(); ++f) {
    const Index K = faces[static_cast<std::size_t>(f)].left;
    const Index L = faces[static_cast<std::size_t>(f)].right;
    const D4 pK(u[2 * K], 4, 0), sK(u[2 * K + 1], 4, 1), pL(u[2 * L], 4, 2), sL(u[2 * L + 1], 4, 3);
    const auto [gas, water] = face_flux(f, pK, sK, pL, sL);
    const Index col[4] = {2 * K, 2 * K + 1, 2 * L, 2 * L + 1};
    for (int j = 0; j < 4; ++j) {
      trip.emplace_back(2 * K, col[j], inv(K) * gas.derivatives()[j]);
      trip.emplace_back(2 * K + 1, col[j], inv(K) * water.derivatives()[j]);
      trip.emplace_back(2 * L, col[j], -inv(L) * gas.derivatives()[j]);
      trip.emplace_back(2 * L + 1, col[j], -inv(L) * water.derivatives()[j]);
    }
  }
  const auto& dfaces = mesh.dirichlet_faces();
  for (std::size_t j = 0; j < dfaces.size(); ++j) {
    const Index K = mesh.boundary_faces()[static_cast<std::size_t>(dfaces[j])].cell;
    const D2 p(u[2 * K], 2, 0), s(u[2 * K + 1], 2, 1);
    const auto [gas, water] = boundary_flux(static_cast<Index>(j), p, s);
    for (int c = 0; c < 2; ++c) {
      trip.emplace_back(2 * K, 2 * K + c, inv(K) * gas.derivatives()[c]);
      trip.emplace_back(2 * K + 1, 2 * K + c, inv(K) * water.derivatives()[c]);
    }
  }
  Eigen::SparseMatrix<double> J(num_unknowns(), num_unknowns());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

Eigen::SparseMatrix<double> Discretization::jacobian_fd(const StepData& step, const Eigen::VectorXd& u) const {
  const Mesh& mesh = *mesh_;
  const Index n = mesh.num_cells();
  const Eigen::VectorXd r0 = residual(step, u);
  std::vector<std::vector<Index>> stencil(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) stencil[static_cast<std::size_t>(k)].push_back(k);
  for (const InteriorFace& f : mesh.interior_faces()) {
    stencil[static_cast<std::size_t>(f.left)].push_back(f.right);
    stencil[static_cast<std::size_t>(f.right)].push_back(f.left);
  }
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd up(u.size());
  Eigen::VectorXd steps = Eigen::VectorXd::Zero(u.size());
  for (int col = 0; col < num_colors_; ++col) {
    for (int comp = 0; comp < 2; ++comp) {
      up = u;
      for (Index k = 0; k < n; ++k) {
        if (color_[static_cast<std::size_t>(k)] != col) continue;
        const Index j = 2 * k + comp;
        volatile double shifted = u[j] + std::max(1e-7, 1e-7 * std::abs(u[j]));
        steps[j] = shifted - u[j];
        up[j] = shifted;
      }
      const Eigen::VectorXd r1 = residual(step, up);
      for (Index k = 0; k < n; ++k) {
        if (color_[static_cast<std::size_t>(k)] != col) continue;
        const Index j = 2 * k + comp;
        for (Index row_cell : stencil[static_cast<std::size_t>(k)])
          for (int eq = 0; eq < 2; ++eq) {
            const Index row = 2 * row_cell + eq;
            trip.emplace_back(row, j, (r1[row] - r0[row]) / steps[j]);
          }
      }
    }
  }
  Eigen::SparseMatrix<double> J(num_unknowns(), num_unknowns());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

WaterBalance Discretization::water_balance(const StepData& step, const State& state) const {
  const Mesh& mesh = *mesh_;
  WaterBalance wb;
  for (Index k = 0; k < mesh.num_cells(); ++k) {
    const double vol = mesh.cell(k).volume;
    wb.accumulation += vol * porosity_[k] * (state.s[k] - step.old.s[k]) / step.dt;
    wb.sources += vol * ((state.s[k] - 1.0) * step.production[k] + step.injection[k]);
  }
  CellField per_cell = CellField::Zero(mesh.num_cells());
  const auto& faces = mesh.interior_faces();
  for (Index f = 0; f < mesh.num_interior_faces(); ++f) {
    const Index K = faces[static_cast<std::size_t>(f)].left;
    const Index L = faces[static_cast<std::size_t>(f)].right;
    const double water = face_flux(f, state.p[K], state.s[K], state.p[L], state.s[L]).second;
    per_cell[K] += water;
    per_cell[L] -= water;
  }
  wb.interior = per_cell.sum();
  const auto& dfaces = mesh.dirichlet_faces();
  for (std::size_t j = 0; j < dfaces.size(); ++j) {
    const Index K = mesh.boundary_faces()[static_cast<std::size_t>(dfaces[j])].cell;
    wb.boundary += boundary_flux(static_cast<Index>(j), state.p[K], state.s[K]).second;
  }
  return wb;
}

SchemeResidual assemble_residual(const Discretization& disc, const State& old_state, const State& new_state,
                                 double dt, double t0) {
  const StepData step = disc.prepare(old_state, t0, dt);
  const Eigen::VectorXd r = disc.residual(step, pack(new_state));
  const Index n = disc.num_cells();
  SchemeResidual out{CellField(n), CellField(n), true};
  for (Index k = 0; k < n; ++k) {
    out.gas[k] = r[2 * k];
    out.water[k] = r[2 * k + 1];
  }
  return out;
}

}  // namespace fvgw
