#pragma once

// Newton time stepping for the implicit scheme, with residual backtracking
// and dt halving, plus the per-step monitors (saturation bounds, energy
// functionals, water balance) and the translate diagnostics.

#include "fvgw/scheme.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fvgw {

enum class LinearSolverKind { sparse_lu, bicgstab };
enum class JacobianKind { analytic, finite_difference };

std::string_view to_string(LinearSolverKind kind);
std::string_view to_string(JacobianKind kind);

struct SolverConfig {
  double dt = 0.01;
  double final_time = 1.0;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  double damping = 0.5;
  int max_halvings = 8;
  double dt_min = 1e-8;
  double dt_growth = 1.2;
  /// A converged step using at most this many Newton iterations lets dt grow.
  int easy_iterations = 4;
  LinearSolverKind linear_solver = LinearSolverKind::sparse_lu;
  JacobianKind jacobian = JacobianKind::analytic;
  double krylov_tol = 1e-13;
  int krylov_max_iter = 2000;
  int save_every = 1;

  /// Throws std::invalid_argument on nonpositive values or dt_min > dt.
  void validate() const;
};

struct NewtonStats {
  int iterations = 0;
  int backtracks = 0;
  std::vector<double> residual_history;  // scaled infinity norms, initial first
};

struct StepResult {
  std::optional<State> state;  // empty on failure
  NewtonStats stats;
  std::string failure;

  bool converged() const { return state.has_value(); }
};

StepResult solve_timestep(const Discretization& disc, const State& old_state, double t0, double dt,
                          const SolverConfig& config);

struct MonitorRecord {
  int step = 0;
  double time = 0.0;
  double dt = 0.0;
  int newton_iters = 0;
  double min_s = 0.0;
  double max_s = 0.0;
  double gas_energy = 0.0;
  double water_energy = 0.0;
  double water_mass_defect = 0.0;
};

struct Snapshot {
  int step = 0;
  double time = 0.0;
  State state;
};

struct Trajectory {
  std::vector<Snapshot> saved;  // initial state first
  std::vector<MonitorRecord> monitors;
  int failed_steps = 0;
  bool aborted = false;
  std::string abort_reason;
  double c1 = 0.0;  // m0 * rho_m used by gas_energy
};

/// Called after every converged step with the new monitor record and state.
using StepObserver = std::function<void(const MonitorRecord&, const State&)>;

/// Marches from t = 0 to final_time. Failed steps halve dt; the run stops
/// (aborted = true) when dt would drop below dt_min.
Trajectory run_simulation(const Discretization& disc, const State& initial, const SolverConfig& config,
                          const StepObserver& observer = {});

/// |sum |K| phi (s - s_old)/dt + Gamma_w fluxes + sum |K| ((s-1) f_P + f_I)|.
double water_mass_defect(const Discretization& disc, const StepData& step, const State& state);

/// Normalization for the balance check: the largest absolute term.
double water_balance_scale(const Discretization& disc, const StepData& step, const State& state);

/// Energy functionals at one time level (no accumulated dissipation).
double gas_storage(const Discretization& disc, const State& state);
double water_storage(const Discretization& disc, const State& state);

/// Dissipation increments dt * sum_K sum_L tau |u_K - u_L|^2 for pressure
/// and beta(s) (Gamma_w faces against the ghost value).
double pressure_dissipation(const Discretization& disc, const State& state);
double capillary_dissipation(const Discretization& disc, const State& state);

struct TranslateNorms {
  double space = 0.0;
  double time = 0.0;
};

/// L2 translate norms of U = phi rho(p) s B(s) over space-time. The space
/// shift is given in lattice cells; the time shift tau must be a sum of
/// consecutive saved intervals (every step saved).
TranslateNorms translate_diagnostics(const Discretization& disc, const Trajectory& trajectory,
                                     const std::array<Index, 3>& shift_cells, double tau);

}  // namespace fvgw
