#include "fvgw/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fvgw {

std::string_view to_string(LinearSolverKind kind) {
  return kind == LinearSolverKind::sparse_lu ? "sparse_lu" : "bicgstab";
}

std::string_view to_string(JacobianKind kind) {
  return kind == JacobianKind::analytic ? "analytic" : "finite_difference";
}

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(fmt::format("{} must be positive", name));
  };
  positive(dt, "dt");
  positive(final_time, "final time");
  positive(newton_tol, "newton_tol");
  positive(dt_min, "dt_min");
  positive(dt_growth, "dt_growth");
  positive(krylov_tol, "krylov_tol");
  if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("damping must lie in (0, 1)");
  if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be at least 1");
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be nonnegative");
  if (save_every < 1) throw std::invalid_argument("save_every must be at least 1");
  if (krylov_max_iter < 1) throw std::invalid_argument("krylov_max_iter must be at least 1");
  if (dt_min > dt) throw std::invalid_argument("dt_min must not exceed dt");
}

namespace {

double inf_norm(const Eigen::VectorXd& r) { return r.size() == 0 ? 0.0 : r.lpNorm<Eigen::Infinity>(); }

std::optional<Eigen::VectorXd> linear_solve(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs,
                                            const SolverConfig& cfg, std::string& why) {
  if (cfg.linear_solver == LinearSolverKind::sparse_lu) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      why = "sparse LU factorization failed: " + lu.lastErrorMessage();
      return std::nullopt;
    }
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) {
      why = "sparse LU solve failed";
      return std::nullopt;
    }
    return x;
  }
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
  krylov.preconditioner().setDroptol(1e-6);
  krylov.preconditioner().setFillfactor(20);
  krylov.setTolerance(cfg.krylov_tol);
  krylov.setMaxIterations(cfg.krylov_max_iter);
  krylov.compute(J);
  if (krylov.info() != Eigen::Success) {
    why = "incomplete LU preconditioner failed";
    return std::nullopt;
  }
  Eigen::VectorXd x = krylov.solve(rhs);
  if (krylov.info() != Eigen::Success) {
    why = fmt::format("BiCGSTAB did not converge (error {:.3g})", krylov.error());
    return std::nullopt;
  }
  return x;
}

}  // namespace

StepResult solve_timestep(const Discretization& disc, const State& old_state, double t0, double dt,
                          const SolverConfig& config) {
  StepResult out;
  const StepData step = disc.prepare(old_state, t0, dt);
  Eigen::VectorXd u = pack(old_state);
  Eigen::VectorXd r;
  try {
    r = disc.residual(step, u);
  } catch (const SchemeError& e) {
    out.failure = e.what();
    return out;
  }
  double norm = inf_norm(r);
  out.stats.residual_history.push_back(norm);

  while (norm > config.newton_tol) {
    if (out.stats.iterations >= config.newton_max_iter) {
      out.failure = fmt::format("Newton did not converge in {} iterations (residual {:.3e})",
                                config.newton_max_iter, norm);
      return out;
    }
    std::string why;
    std::optional<Eigen::VectorXd> delta;
    try {
      const Eigen::SparseMatrix<double> J =
          config.jacobian == JacobianKind::analytic ? disc.jacobian(step, u) : disc.jacobian_fd(step, u);
      delta = linear_solve(J, -r, config, why);
    } catch (const SchemeError& e) {
      why = e.what();
    }
    if (!delta || !delta->allFinite()) {
      out.failure = why.empty() ? "linear solve produced non-finite update" : why;
      return out;
    }

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= config.max_halvings; ++h) {
      const Eigen::VectorXd trial = u + lambda * *delta;
      double trial_norm = std::numeric_limits<double>::infinity();
      Eigen::VectorXd trial_r;
      try {
        trial_r = disc.residual(step, trial);
        trial_norm = inf_norm(trial_r);
      } catch (const SchemeError&) {
      }
      if (std::isfinite(trial_norm) && (trial_norm < norm || trial_norm <= config.newton_tol)) {
        u = trial;
        r = std::move(trial_r);
        norm = trial_norm;
        accepted = true;
        break;
      }
      lambda *= config.damping;
      ++out.stats.backtracks;
    }
    ++out.stats.iterations;
    if (!accepted) {
      out.failure = fmt::format("line search failed after {} halvings (residual {:.3e})", config.max_halvings, norm);
      return out;
    }
    out.stats.residual_history.push_back(norm);
  }
  out.state = unpack(u);
  return out;
}

// ---------------------------------------------------------------------------
// Monitors

double gas_storage(const Discretization& disc, const State& state) {
  double acc = 0.0;
  for (Index k = 0; k < state.size(); ++k)
    acc += disc.mesh().cell(k).volume * state.s[k] * disc.functions().big_H(state.p[k]);
  return acc;
}

double water_storage(const Discretization& disc, const State& state) {
  double acc = 0.0;
  for (Index k = 0; k < state.size(); ++k)
    acc += disc.mesh().cell(k).volume * disc.functions().big_B(state.s[k]);
  return acc;
}

namespace {

template <class F>
double dissipation(const Discretization& disc, const CellField& v, double ghost, F&& transform) {
  const Mesh& mesh = disc.mesh();
  double acc = 0.0;
  for (const InteriorFace& f : mesh.interior_faces()) {
    const double d = transform(v[f.left]) - transform(v[f.right]);
    acc += 2.0 * f.transmissibility() * d * d;  // seen from both cells
  }
  for (Index b : mesh.dirichlet_faces()) {
    const BoundaryFace& f = mesh.boundary_faces()[static_cast<std::size_t>(b)];
    const double d = transform(v[f.cell]) - ghost;
    acc += f.transmissibility() * d * d;
  }
  return acc;
}

}  // namespace

double pressure_dissipation(const Discretization& disc, const State& state) {
  return dissipation(disc, state.p, disc.boundary().pressure, [](double x) { return x; });
}

double capillary_dissipation(const Discretization& disc, const State& state) {
  const auto& fn = disc.functions();
  return dissipation(disc, state.s, fn.beta(disc.boundary().saturation), [&](double x) { return fn.beta(x); });
}

double water_mass_defect(const Discretization& disc, const StepData& step, const State& state) {
  const WaterBalance wb = disc.water_balance(step, state);
  return std::abs(wb.accumulation + wb.boundary + wb.sources);
}

double water_balance_scale(const Discretization& disc, const StepData& step, const State& state) {
  const WaterBalance wb = disc.water_balance(step, state);
  return std::max({1.0, std::abs(wb.accumulation), std::abs(wb.boundary), std::abs(wb.sources)});
}

Trajectory run_simulation(const Discretization& disc, const State& initial, const SolverConfig& config,
                          const StepObserver& observer) {
  config.validate();
  Trajectory traj;
  traj.c1 = disc.functions().total_mobility_floor() * disc.functions().density().lower_bound();
  traj.saved.push_back({0, 0.0, initial});

  State current = initial;
  double t = 0.0;
  double dt = config.dt;
  double p_acc = 0.0, beta_acc = 0.0;
  int step = 0;
  const double T = config.final_time;
  const double eps = 1e-12 * T;

  while (T - t > eps) {
    double h = std::min(dt, T - t);
    // Avoid a sliver step at the end.
    if (T - (t + h) <= eps) h = T - t;
    StepResult res = solve_timestep(disc, current, t, h, config);
    if (!res.converged()) {
      ++traj.failed_steps;
      dt = 0.5 * h;
      if (dt < config.dt_min) {
        traj.aborted = true;
        traj.abort_reason = fmt::format("time step fell below dt_min at t = {}: {}", t, res.failure);
        break;
      }
      continue;
    }
    const StepData data = disc.prepare(current, t, h);
    State next = std::move(*res.state);
    ++step;
    const double t_next = (T - (t + h) <= eps) ? T : t + h;

    p_acc += h * pressure_dissipation(disc, next);
    beta_acc += h * capillary_dissipation(disc, next);

    MonitorRecord rec;
    rec.step = step;
    rec.time = t_next;
    rec.dt = h;
    rec.newton_iters = res.stats.iterations;
    rec.min_s = next.s.minCoeff();
    rec.max_s = next.s.maxCoeff();
    rec.gas_energy = gas_storage(disc, next) + 0.5 * traj.c1 * p_acc;
    rec.water_energy = water_storage(disc, next) + 0.25 * beta_acc;
    rec.water_mass_defect = water_mass_defect(disc, data, next);
    traj.monitors.push_back(rec);

    current = std::move(next);
    t = t_next;
    if (step % config.save_every == 0 || t >= T) traj.saved.push_back({step, t, current});
    if (observer) observer(rec, current);

    if (res.stats.iterations <= config.easy_iterations) dt = std::min(dt * config.dt_growth, config.dt);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Translate diagnostics

namespace {

CellField translate_density(const Discretization& disc, const State& st) {
  const auto& fn = disc.functions();
  const FluidModel& m = disc.model();
  CellField u(st.size());
  for (Index k = 0; k < st.size(); ++k) {
    const double phi = m.porosity.size() ? m.porosity[k] : 1.0;
    u[k] = phi * fn.density().value(st.p[k]) * st.s[k] * fn.big_B(st.s[k]);
  }
  return u;
}

}  // namespace

TranslateNorms translate_diagnostics(const Discretization& disc, const Trajectory& trajectory,
                                     const std::array<Index, 3>& shift_cells, double tau) {
  const Mesh& mesh = disc.mesh();
  if (!mesh.lattice()) throw std::invalid_argument("translate diagnostics need a lattice mesh");
  const Lattice& lat = *mesh.lattice();
  for (int a = 0; a < 3; ++a)
    if (std::abs(shift_cells[static_cast<std::size_t>(a)]) >= lat.counts[static_cast<std::size_t>(a)] &&
        shift_cells[static_cast<std::size_t>(a)] != 0)
      throw std::domain_error("space shift exceeds the domain");
  const auto& saved = trajectory.saved;
  if (saved.size() < 2) throw std::invalid_argument("translate diagnostics need at least one time step");
  const double T = saved.back().time;
  if (tau < 0.0 || tau >= T) throw std::domain_error("time shift must lie in [0, T)");

  std::vector<CellField> U;
  for (std::size_t i = 1; i < saved.size(); ++i) U.push_back(translate_density(disc, saved[i].state));
  const Eigen::VectorXd vol = mesh.volumes();

  TranslateNorms out;
  // Space: sum over intervals of dt * sum over cells K with K+y inside.
  for (std::size_t i = 0; i < U.size(); ++i) {
    const double dt = saved[i + 1].time - saved[i].time;
    double acc = 0.0;
    for (Index k = 0; k < mesh.num_cells(); ++k) {
      auto c = lat.cell_coords(k);
      bool ok = true;
      for (int a = 0; a < 3; ++a) {
        c[static_cast<std::size_t>(a)] += shift_cells[static_cast<std::size_t>(a)];
        ok = ok && c[static_cast<std::size_t>(a)] >= 0 &&
             c[static_cast<std::size_t>(a)] < lat.counts[static_cast<std::size_t>(a)];
      }
      if (!ok) continue;
      const double d = U[i][lat.cell_index(c[0], c[1], c[2])] - U[i][k];
      acc += vol[k] * d * d;
    }
    out.space += dt * acc;
  }
  out.space = std::sqrt(out.space);

  // Time: int_0^{T-tau} |U(t+tau) - U(t)|^2, U piecewise constant on
  // (t_{i-1}, t_i].
  if (tau > 0.0) {
    std::vector<double> cuts{0.0, T - tau};
    for (const auto& s : saved) {
      if (s.time > 0.0 && s.time < T - tau) cuts.push_back(s.time);
      if (s.time - tau > 0.0 && s.time - tau < T - tau) cuts.push_back(s.time - tau);
    }
    std::sort(cuts.begin(), cuts.end());
    auto piece = [&](double t) {
      // index of the interval containing t (open left, closed right)
      auto it = std::lower_bound(saved.begin() + 1, saved.end(), t,
                                 [](const Snapshot& s, double v) { return s.time < v; });
      if (it == saved.end()) --it;
      return static_cast<std::size_t>(it - saved.begin() - 1);
    };
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      if (b - a <= 0.0) continue;
      const double mid = 0.5 * (a + b);
      const CellField diff = U[piece(mid + tau)] - U[piece(mid)];
      acc += (b - a) * diff.cwiseAbs2().dot(vol);
    }
    out.time = std::sqrt(acc);
  }
  return out;
}

}  // namespace fvgw
