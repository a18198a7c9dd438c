// One line per acceptance criterion; exit status 1 if any fails.

#include "fvgw/convergence.hpp"
#include "fvgw/simulation.hpp"

#include <fmt/format.h>

#include <chrono>
#include <random>

using namespace fvgw;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = FVGW_SCENARIO_DIR;
using Rng = std::mt19937_64;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  fmt::print("{} {:>2} {}: {}\n", pass ? "PASS" : "FAIL", id, name, detail);
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

CellField random_field(Rng& rng, Index n) {
  return CellField::NullaryExpr(n, [&] { return uniform(rng, -1.0, 1.0); });
}

SideTags mixed_tags() {
  SideTags t;
  t.fill(BoundaryTag::impervious);
  t[0] = BoundaryTag::water_injection;
  t[3] = BoundaryTag::water_injection;
  return t;
}

Mesh unit_square(Index n) { return build_rect_mesh(n, n, Box{Vec3::Zero(), Vec3(1, 1, 0)}, mixed_tags()); }

FluidModel reference_model(Index cells) {
  FluidModel m;
  m.density = Density(ExponentialDensity{0.5, 1.5, 1.0});
  m.capillary = Capillary(PowerCapillary{1.0, 1.0});
  m.porosity = CellField::Ones(cells);
  m.permeability = CellField::Ones(cells);
  return m;
}

std::vector<FluidModel> models() {
  std::vector<FluidModel> out{reference_model(0)};
  FluidModel m = reference_model(0);
  m.density = Density(LogisticDensity{0.8, 2.0, 0.7, 1.0});
  m.gas_mobility = Mobility(PowerMobility{1.0, 3.0, false});
  m.water_mobility = Mobility(PowerMobility{1.0, 1.5, true});
  m.total_mobility_floor = 0.2;
  m.capillary = Capillary(SaturatingCapillary{1.0, 4.0});
  out.push_back(m);
  return out;
}

void duality() {
  const auto t0 = Clock::now();
  Rng rng(11);
  double worst = 0.0;
  for (Index n : {2, 8, 16}) {
    const Mesh mesh = unit_square(n);
    for (int t = 0; t < 100; ++t) {
      const CellField w = random_field(rng, mesh.num_cells());
      const DiamondField F = DiamondField::NullaryExpr(mesh.num_diamonds(), 2, [&] { return uniform(rng, -1, 1); });
      const DualityCheck d = duality_defect(mesh, w, F);
      worst = std::max(worst, d.defect / d.scale);
    }
  }
  const double secs = seconds_since(t0);
  report(1, "discrete duality", worst <= 1e-12 && secs < 5.0,
         fmt::format("max defect/scale {:.3e} (tol 1e-12), {:.2f} s (limit 5 s)", worst, secs));
}

void norm_identity() {
  Rng rng(12);
  double worst = 0.0;
  for (Index n : {2, 8, 16}) {
    const Mesh mesh = unit_square(n);
    for (int t = 0; t < 100; ++t) {
      const CellField u = random_field(rng, mesh.num_cells());
      const double a = h_norm(mesh, u);
      const double b = diamond_l2_norm(mesh, discrete_gradient(mesh, u));
      worst = std::max(worst, std::abs(a - b) / a);
    }
  }
  report(2, "norm identity", worst <= 1e-13, fmt::format("max relative error {:.3e} (tol 1e-13)", worst));
}

void flux_hypotheses() {
  const auto t0 = Clock::now();
  Rng rng(13);
  double consistency = 0.0, conservativity = 0.0, monotone = 0.0, coercive = 0.0;
  for (const FluidModel& m : models()) {
    const DerivedFunctions fn(m);
    const FluxKernel k(fn);
    for (int i = 0; i < 10000; ++i) {
      const double a = uniform(rng, 0, 1), b = uniform(rng, 0, 1), c = uniform(rng, -5, 5);
      consistency = std::max(consistency, std::abs(k.G1(a, a, c) + m.gas_mobility.value(a) * c));
      consistency = std::max(consistency, std::abs(k.G2(a, a, c) - m.water_mobility.value(a) * c));
      conservativity = std::max(conservativity, std::abs(k.G1(a, b, c) + k.G1(b, a, -c)));
      conservativity = std::max(conservativity, std::abs(k.G2(a, b, c) + k.G2(b, a, -c)));
      const double da = uniform(rng, 0, 1 - a), db = uniform(rng, 0, 1 - b);
      monotone = std::min({monotone, k.G1(a + da, b, c) - k.G1(a, b, c), k.G2(a + da, b, c) - k.G2(a, b, c),
                           k.G1(a, b, c) - k.G1(a, b + db, c), k.G2(a, b, c) - k.G2(a, b + db, c)});
      coercive = std::min(coercive, k.coercivity_gap(a, b, c));
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = consistency == 0.0 && conservativity == 0.0 && monotone >= -1e-12 && coercive >= -1e-12 &&
                    secs < 5.0;
  report(3, "flux hypotheses", pass,
         fmt::format("consistency {:.1e}, conservativity {:.1e} (exact), monotonicity {:.1e}, coercivity {:.1e} "
                     "(slack 1e-12), {:.2f} s (limit 5 s)",
                     consistency, conservativity, monotone, coercive, secs));
}

void energy_mechanism() {
  Rng rng(14);
  double identity = 0.0, magic = 0.0;
  for (const FluidModel& m : models()) {
    const DerivedFunctions fn(m);
    const auto& rho = fn.density();
    for (int i = 0; i < 10000; ++i) {
      const double pK = uniform(rng, -10, 10), pL = uniform(rng, -10, 10);
      const double a = fn.interface_density(pK, pL) * (pL - pK);
      const double b = fn.g_aux(pL) - fn.g_aux(pK);
      identity = std::max(identity, std::abs(a + b) / std::max({std::abs(a), std::abs(b), 1e-300}));
    }
    for (int i = 0; i < 10000; ++i) {
      const double p = uniform(rng, -10, 10), ps = uniform(rng, -10, 10);
      const double s = uniform(rng, 0, 1), ss = uniform(rng, 0, 1);
      const double lhs = (rho.value(p) * s - rho.value(ps) * ss) * p + (s - ss) * (fn.big_H(p) - rho.value(p) * p);
      const double rhs = fn.big_H(p) * s - fn.big_H(ps) * ss;
      magic = std::min(magic, (lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
  }
  report(4, "energy identity and magic inequality", identity <= 1e-10 && magic >= -1e-10,
         fmt::format("identity {:.3e} (tol 1e-10), min magic gap {:.3e} (slack -1e-10)", identity, magic));
}

struct RunSummary {
  std::string name;
  int steps = 0;
  bool aborted = false;
  double min_s = 1.0, max_s = 0.0;
  double worst_balance = 0.0;  // defect / (10 tol n scale)
};

RunSummary run_scenario(const std::string& file) {
  const Problem problem(load_config(kScenarios / file));
  const Discretization& disc = problem.discretization();
  const double tol = problem.config().solver.newton_tol;
  RunSummary out{file};
  State prev = problem.initial();
  const Trajectory tr = run_simulation(disc, problem.initial(), problem.config().solver,
                                       [&](const MonitorRecord& rec, const State& state) {
                                         const StepData step = disc.prepare(prev, rec.time - rec.dt, rec.dt);
                                         const double bound = 10.0 * tol * static_cast<double>(disc.num_cells()) *
                                                              water_balance_scale(disc, step, state);
                                         out.worst_balance =
                                             std::max(out.worst_balance, water_mass_defect(disc, step, state) / bound);
                                         out.min_s = std::min(out.min_s, rec.min_s);
                                         out.max_s = std::max(out.max_s, rec.max_s);
                                         prev = state;
                                       });
  out.steps = static_cast<int>(tr.monitors.size());
  out.aborted = tr.aborted;
  return out;
}

std::vector<RunSummary> shipped_runs;

void maximum_principle() {
  const auto t0 = Clock::now();
  for (const char* f : {"injection.toml", "gravity.toml", "heterogeneous.toml"}) shipped_runs.push_back(run_scenario(f));
  const double secs = seconds_since(t0);
  bool pass = secs < 300.0;
  std::string detail;
  for (const RunSummary& r : shipped_runs) {
    pass = pass && !r.aborted && r.steps >= 100 && r.min_s >= -1e-10 && r.max_s <= 1 + 1e-10;
    detail += fmt::format("{} {} steps s in [{:.3e}, {:.12f}]; ", r.name, r.steps, r.min_s, r.max_s);
  }
  report(5, "maximum principle", pass, detail + fmt::format("{:.1f} s (limit 300 s)", secs));
}

// reuses the three runs above and adds the remaining shipped scenarios
void water_balance() {
  for (const char* f : {"uniform.toml", "smooth.toml"}) shipped_runs.push_back(run_scenario(f));
  double worst = 0.0;
  bool ran = true;
  for (const RunSummary& r : shipped_runs) {
    worst = std::max(worst, r.worst_balance);
    ran = ran && !r.aborted;
  }
  report(8, "global water-mass balance", ran && worst <= 1.0,
         fmt::format("max defect / (10 tol n_cells scale) = {:.3e} over {} scenarios", worst, shipped_runs.size()));
}

void residual_oracle() {
  // M1 = s^2, M2 = (1-s)^2, alpha = 2s(1-s), rho = 1 on unit cells [0,1] and [1,2];
  // p = (1, 0), s = (0.2, 0.8), old s = 0.5, phi = 1, dt = 1. Values by hand:
  // beta(s) = s^2 - 2 s^3 / 3, dp = -1, beta(0.8) - beta(0.2) = 0.264,
  // G1 = M1(0.2) = 0.04, G2 = -M2(0.2) = -0.64.
  const double expected_gas[] = {-0.3 - 0.264 + 0.04, 0.3 + 0.264 - 0.04};
  const double expected_water[] = {-0.3 - 0.264 - 0.64, 0.3 + 0.264 + 0.64};
  SideTags closed;
  closed.fill(BoundaryTag::impervious);
  const Mesh mesh = build_rect_mesh(2, 1, Box{Vec3::Zero(), Vec3(2, 1, 0)}, closed);
  FluidModel fm;
  fm.density = Density(ConstantDensity{1.0});
  fm.capillary = Capillary(PolynomialCapillary{{0.0, 2.0, -2.0}});
  fm.porosity = CellField::Ones(2);
  const Discretization disc(mesh, fm);
  const State old{CellField::Zero(2), CellField::Constant(2, 0.5)};
  const State cur{(CellField(2) << 1.0, 0.0).finished(), (CellField(2) << 0.2, 0.8).finished()};
  const SchemeResidual r = assemble_residual(disc, old, cur, 1.0, 0.0);
  double worst = 0.0;
  for (int k = 0; k < 2; ++k)
    worst = std::max({worst, std::abs(r.gas[k] - expected_gas[k]), std::abs(r.water[k] - expected_water[k])});
  report(6, "two-cell residual oracle", worst <= 1e-14, fmt::format("max abs error {:.3e} (tol 1e-14)", worst));
}

void jacobian_check() {
  Rng rng(16);
  const Mesh mesh = unit_square(3);
  FluidModel model = reference_model(mesh.num_cells());
  model.gravity = Vec3(0.0, -1.0, 0.0);
  const Discretization disc(mesh, model, DirichletData{0.2, 0.3});
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const State old{random_field(rng, 9), (random_field(rng, 9).array() * 0.4 + 0.5).matrix()};
    const State cur{random_field(rng, 9), (random_field(rng, 9).array() * 0.4 + 0.5).matrix()};
    const StepData step = disc.prepare(old, 0.0, 0.1);
    const Eigen::MatrixXd A(disc.jacobian(step, pack(cur)));
    const Eigen::MatrixXd F(disc.jacobian_fd(step, pack(cur)));
    for (Index r = 0; r < A.rows(); ++r)
      worst = std::max(worst, (A.row(r) - F.row(r)).cwiseAbs().maxCoeff() / A.row(r).cwiseAbs().maxCoeff());
  }
  report(7, "jacobian cross-check", worst < 1e-5, fmt::format("max row-relative mismatch {:.3e} (tol 1e-5)", worst));
}

void energy_bounds() {
  // injection scenario coarsened to 8x8 with dt scaled like h, shortened horizon
  SimulationConfig base = load_config(kScenarios / "injection.toml");
  base.mesh.rect.counts = {8, 8, 1};
  base.solver.dt = 4e-3;
  base.solver.final_time = 0.04;
  base.output.fields = false;
  std::vector<std::pair<double, double>> peaks;
  bool ran = true;
  for (int level = 0; level < 4; ++level) {
    const Problem problem(refine_config(base, level));
    const SimulationResult res = simulate(problem, false);
    ran = ran && !res.trajectory.aborted;
    double gas = 0.0, water = 0.0;
    for (const MonitorRecord& m : res.trajectory.monitors) {
      gas = std::max(gas, m.gas_energy);
      water = std::max(water, m.water_energy);
    }
    peaks.emplace_back(gas, water);
  }
  double ratio = 0.0;
  std::string detail;
  for (const auto& [gas, water] : peaks) {
    ratio = std::max({ratio, gas / peaks[0].first, water / peaks[0].second});
    detail += fmt::format("({:.4g}, {:.4g}) ", gas, water);
  }
  report(9, "energy monitor bounds", ran && ratio <= 2.0,
         fmt::format("peak (gas, water) per level {}; max ratio to coarsest {:.3f} (limit 2)", detail, ratio));
}

void convergence() {
  const auto t0 = Clock::now();
  const ErrorTable t = run_convergence(load_config(kScenarios / "smooth.toml"), 3);
  const double secs = seconds_since(t0);
  bool decreasing = true;
  std::string detail;
  for (std::size_t l = 0; l < t.levels.size(); ++l) {
    if (l > 0)
      decreasing = decreasing && t.levels[l].error_p < t.levels[l - 1].error_p &&
                   t.levels[l].error_s < t.levels[l - 1].error_s;
    detail += fmt::format("{}x: ({:.3e}, {:.3e}) ", t.levels[l].cells, t.levels[l].error_p, t.levels[l].error_s);
  }
  report(10, "experimental convergence", decreasing && secs < 600.0,
         fmt::format("L2 errors (p, s) {}; {:.1f} s (limit 600 s)", detail, secs));
}

void translates() {
  SimulationConfig cfg = refine_config(load_config(kScenarios / "smooth.toml"), 3);  // 32x32
  cfg.output.fields = false;
  const Problem problem(cfg);
  const SimulationResult res = simulate(problem, false);
  std::vector<double> norms;
  for (Index shift : {8, 4, 2})
    norms.push_back(translate_diagnostics(problem.discretization(), res.trajectory, {shift, 0, 0}, cfg.solver.dt).space);
  const bool pass = !res.trajectory.aborted && norms[1] <= norms[0] && norms[2] <= norms[1];
  report(11, "translate diagnostics", pass,
         fmt::format("space translate norms for shifts 8, 4, 2 cells: {:.4e}, {:.4e}, {:.4e}", norms[0], norms[1],
                     norms[2]));
}

}  // namespace

int main() {
  duality();
  norm_identity();
  flux_hypotheses();
  energy_mechanism();
  maximum_principle();
  residual_oracle();
  jacobian_check();
  water_balance();
  energy_bounds();
  convergence();
  translates();
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
