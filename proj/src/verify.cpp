#include "fvgw/verify.hpp"

#include "fvgw/fluxes.hpp"
#include "fvgw/mesh.hpp"
#include "fvgw/physics.hpp"
#include "fvgw/scheme.hpp"
#include "fvgw/solver.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <random>

namespace fvgw {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

SideTags mixed_tags() {
  SideTags t;
  t.fill(BoundaryTag::impervious);
  t[0] = BoundaryTag::water_injection;
  t[3] = BoundaryTag::water_injection;
  return t;
}

SideTags closed_tags() {
  SideTags t;
  t.fill(BoundaryTag::impervious);
  return t;
}

CellField random_field(Rng& rng, Index n) {
  CellField u(n);
  for (Index i = 0; i < n; ++i) u[i] = uniform(rng, -1.0, 1.0);
  return u;
}

FluidModel reference_model(Index cells) {
  FluidModel m;
  m.density = Density(ExponentialDensity{0.5, 1.5, 1.0});
  m.capillary = Capillary(PowerCapillary{1.0, 1.0});
  m.porosity = CellField::Ones(cells);
  m.permeability = CellField::Ones(cells);
  return m;
}

std::vector<FluidModel> model_family() {
  std::vector<FluidModel> out;
  out.push_back(reference_model(0));
  FluidModel logistic = reference_model(0);
  logistic.density = Density(LogisticDensity{0.8, 2.0, 0.7, 1.0});
  logistic.gas_mobility = Mobility(PowerMobility{1.0, 3.0, false});
  logistic.water_mobility = Mobility(PowerMobility{1.0, 1.5, true});
  logistic.total_mobility_floor = 0.2;
  logistic.capillary = Capillary(SaturatingCapillary{1.0, 4.0});
  out.push_back(logistic);
  FluidModel bumpy = reference_model(0);
  bumpy.gas_mobility = Mobility(PolynomialMobility{{0.0, 1.0, -0.5}});
  bumpy.water_mobility = Mobility(PolynomialMobility{{0.30, 0.4, -0.7}});  // zero at 1, non-monotone
  bumpy.total_mobility_floor = 0.2;
  bumpy.capillary = Capillary(PolynomialCapillary{{0.0, 2.0, -2.0}});
  out.push_back(bumpy);
  return out;
}

// ---------------------------------------------------------------------------
// mesh

SuiteOutcome duality_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed);
  const int trials = opt.full ? 1000 : 100;
  double worst = 0.0;
  for (Index n : {2, 8, 16}) {
    const Mesh mesh = build_rect_mesh(n, n, Box{Vec3::Zero(), Vec3(1, 1, 0)}, mixed_tags());
    for (int t = 0; t < trials; ++t) {
      const CellField w = random_field(rng, mesh.num_cells());
      const DiamondField F = DiamondField::NullaryExpr(mesh.num_diamonds(), 2, [&] { return uniform(rng, -1, 1); });
      const DualityCheck d = duality_defect(mesh, w, F);
      worst = std::max(worst, d.defect / d.scale);
    }
  }
  return {worst <= 1e-12, fmt::format("max relative defect {:.3e}", worst)};
}

SuiteOutcome norm_identity_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 1);
  const int trials = opt.full ? 1000 : 100;
  double worst = 0.0;
  for (Index n : {2, 4, 8}) {
    const Mesh mesh = build_rect_mesh(n, n + 1, Box{Vec3::Zero(), Vec3(1, 2, 0)}, mixed_tags());
    for (int t = 0; t < trials; ++t) {
      const CellField u = random_field(rng, mesh.num_cells());
      const double a = h_norm(mesh, u);
      const double b = diamond_l2_norm(mesh, discrete_gradient(mesh, u));
      worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
    }
  }
  return {worst <= 1e-13, fmt::format("max relative mismatch {:.3e}", worst)};
}

SuiteOutcome poincare_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 2);
  const int trials = opt.full ? 1000 : 100;
  double worst = 0.0;
  for (Index n : {3, 8}) {
    const Mesh mesh = build_rect_mesh(n, n, Box{Vec3::Zero(), Vec3(1, 1, 0)}, mixed_tags());
    for (int t = 0; t < trials; ++t) {
      const CellField u = random_field(rng, mesh.num_cells());
      worst = std::max(worst, l2_norm(mesh, u) / (mesh.domain_diameter() * h_norm(mesh, u)));
    }
  }
  return {worst <= 1.0, fmt::format("max ratio ||u|| / (diam ||u||_H) = {:.3f}", worst)};
}

SuiteOutcome partition_suite(const VerifyOptions&) {
  double worst = 0.0;
  bool diamonds_ok = true;
  for (Index n : {1, 4, 16}) {
    const Mesh mesh = build_rect_mesh(n, 2 * n, Box{Vec3::Zero(), Vec3(2, 1, 0)}, mixed_tags());
    worst = std::max(worst, std::abs(mesh.volumes().sum() - mesh.domain_volume()) / mesh.domain_volume());
    double diamonds = 0.0;
    for (const auto& f : mesh.interior_faces()) diamonds += f.diamond_measure;
    diamonds_ok = diamonds_ok && diamonds <= mesh.domain_volume() * (1 + 1e-12);
  }
  return {worst <= 1e-12 && diamonds_ok, fmt::format("volume defect {:.3e}", worst)};
}

// ---------------------------------------------------------------------------
// physics

SuiteOutcome split_suite(const VerifyOptions& opt) {
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  bool monotone = true;
  for (const FluidModel& m : model_family()) {
    for (const Mobility* mob : {&m.gas_mobility, &m.water_mobility}) {
      const MonotoneSplit split(*mob);
      double prev_up = split.up(0.0), prev_down = split.down(0.0);
      for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const double up = split.up(s), down = split.down(s);
        worst = std::max(worst, std::abs(up + down + split.at_zero() - mob->value(s)));
        monotone = monotone && up >= prev_up - 1e-15 && down <= prev_down + 1e-15;
        prev_up = up;
        prev_down = down;
      }
    }
  }
  return {worst <= 1e-10 && monotone, fmt::format("max reconstruction error {:.3e}", worst)};
}

SuiteOutcome beta_suite(const VerifyOptions& opt) {
  const int n = opt.full ? 2000 : 200;
  double worst = 0.0;
  bool monotone = true;
  for (const FluidModel& m : model_family()) {
    double prev = -1.0;
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      const double b = m.capillary.beta(s);
      monotone = monotone && b >= prev;
      prev = b;
      worst = std::max(worst, std::abs(m.capillary.beta_inverse(b) - s));
    }
  }
  return {worst <= 1e-8 && monotone, fmt::format("max round-trip error {:.3e}", worst)};
}

SuiteOutcome interface_density_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 3);
  const int n = opt.full ? 100000 : 10000;
  bool ok = true;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    for (int i = 0; i < n; ++i) {
      const double a = uniform(rng, -10, 10);
      const double b = i % 3 == 0 ? a + uniform(rng, -1e-6, 1e-6) : uniform(rng, -10, 10);
      const double ab = fn.interface_density(a, b), ba = fn.interface_density(b, a);
      ok = ok && ab == ba && ab >= fn.density().lower_bound() && ab <= fn.density().upper_bound();
    }
  }
  return {ok, ok ? "symmetric and bounded" : "asymmetric or out of bounds"};
}

SuiteOutcome energy_identity_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 4);
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    for (int i = 0; i < n; ++i) {
      const double pK = uniform(rng, -10, 10);
      const double pL = i % 4 == 0 ? pK + uniform(rng, -1e-4, 1e-4) : uniform(rng, -10, 10);
      const double a = fn.interface_density(pK, pL) * (pL - pK);
      const double b = fn.g_aux(pL) - fn.g_aux(pK);
      const double scale = std::max({std::abs(a), std::abs(fn.g_aux(pK)), std::abs(fn.g_aux(pL)), 1e-300});
      worst = std::max(worst, std::abs(a + b) / scale);
    }
  }
  return {worst <= 1e-10, fmt::format("max relative residual {:.3e}", worst)};
}

SuiteOutcome magic_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 5);
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    const auto& rho = fn.density();
    for (int i = 0; i < n; ++i) {
      const double p = uniform(rng, -10, 10), ps = uniform(rng, -10, 10);
      const double s = uniform(rng, 0, 1), ss = uniform(rng, 0, 1);
      const double lhs = (rho.value(p) * s - rho.value(ps) * ss) * p + (s - ss) * (fn.big_H(p) - rho.value(p) * p);
      const double rhs = fn.big_H(p) * s - fn.big_H(ps) * ss;
      const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
      worst = std::min(worst, (lhs - rhs) / scale);
    }
  }
  return {worst >= -1e-10, fmt::format("min scaled gap {:.3e}", worst)};
}

SuiteOutcome h_nonnegative_suite(const VerifyOptions& opt) {
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    for (int i = 0; i <= n; ++i) worst = std::min(worst, fn.big_H(-10.0 + 20.0 * i / n));
  }
  return {worst >= -1e-12, fmt::format("min H on [-10, 10] = {:.3e}", worst)};
}

// ---------------------------------------------------------------------------
// fluxes

SuiteOutcome consistency_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 6);
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    const FluxKernel k(fn);
    for (int i = 0; i < n; ++i) {
      const double a = uniform(rng, 0, 1), c = uniform(rng, -5, 5);
      worst = std::max(worst, std::abs(k.G1(a, a, c) + m.gas_mobility.value(a) * c));
      worst = std::max(worst, std::abs(k.G2(a, a, c) - m.water_mobility.value(a) * c));
    }
  }
  return {worst <= 1e-12, fmt::format("max consistency error {:.3e}", worst)};
}

SuiteOutcome conservativity_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 7);
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    const FluxKernel k(fn);
    for (int i = 0; i < n; ++i) {
      const double a = uniform(rng, -0.1, 1.1), b = uniform(rng, -0.1, 1.1), c = uniform(rng, -5, 5);
      worst = std::max(worst, std::abs(k.G1(a, b, c) + k.G1(b, a, -c)));
      worst = std::max(worst, std::abs(k.G2(a, b, c) + k.G2(b, a, -c)));
    }
  }
  return {worst == 0.0, fmt::format("max |G(a,b,c) + G(b,a,-c)| = {:.3e}", worst)};
}

SuiteOutcome monotonicity_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 8);
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    const FluxKernel k(fn);
    for (int i = 0; i < n; ++i) {
      const double a = uniform(rng, 0, 1), b = uniform(rng, 0, 1), c = uniform(rng, -5, 5);
      const double da = uniform(rng, 0, 1 - a), db = uniform(rng, 0, 1 - b);
      worst = std::min(worst, k.G1(a + da, b, c) - k.G1(a, b, c));
      worst = std::min(worst, k.G2(a + da, b, c) - k.G2(a, b, c));
      worst = std::min(worst, k.G1(a, b, c) - k.G1(a, b + db, c));
      worst = std::min(worst, k.G2(a, b, c) - k.G2(a, b + db, c));
    }
  }
  return {worst >= -1e-12, fmt::format("worst monotonicity violation {:.3e}", worst)};
}

SuiteOutcome coercivity_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 9);
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    const FluxKernel k(fn);
    for (int i = 0; i < n; ++i) {
      const double a = uniform(rng, 0, 1), b = uniform(rng, 0, 1), c = uniform(rng, -5, 5);
      worst = std::min(worst, k.coercivity_gap(a, b, c) / std::max(c * c, 1e-300));
    }
  }
  return {worst >= -1e-12, fmt::format("min gap / c^2 = {:.3e}", worst)};
}

SuiteOutcome gravity_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 10);
  const int n = opt.full ? 100000 : 10000;
  double worst = 0.0;
  double mono = 0.0;
  for (const FluidModel& m : model_family()) {
    const DerivedFunctions fn(m);
    const bool m2_monotone = MonotoneSplit(m.water_mobility).nonincreasing();
    for (int i = 0; i < n; ++i) {
      const Vec3 g(uniform(rng, -2, 2), uniform(rng, -2, 2), 0.0);
      const double ang = uniform(rng, 0, 6.283185307179586);
      const Vec3 eta(std::cos(ang), std::sin(ang), 0.0);
      const FaceGravity fg = face_gravity(g, eta, uniform(rng, 0.1, 1.0));
      const double pK = uniform(rng, -3, 3), pL = uniform(rng, -3, 3);
      const double sK = uniform(rng, 0, 1), sL = uniform(rng, 0, 1);
      worst = std::max(worst, std::abs(gravity_flux_F1(fn, pK, pL, sK, sL, fg) +
                                       gravity_flux_F1(fn, pL, pK, sL, sK, fg.reversed())));
      worst = std::max(worst, std::abs(gravity_flux_F2(fn, sK, sL, fg) + gravity_flux_F2(fn, sL, sK, fg.reversed())));
      if (!m2_monotone) continue;
      const double ds = uniform(rng, 0, 1 - std::max(sK, sL));
      mono = std::min(mono, gravity_flux_F2(fn, sK + ds, sL, fg) - gravity_flux_F2(fn, sK, sL, fg));
      mono = std::min(mono, gravity_flux_F2(fn, sK, sL, fg) - gravity_flux_F2(fn, sK, sL + ds, fg));
    }
  }
  return {worst == 0.0 && mono >= -1e-12,
          fmt::format("antisymmetry defect {:.3e}, F2 monotonicity {:.3e}", worst, mono)};
}

// ---------------------------------------------------------------------------
// scheme and solver

SuiteOutcome uniform_state_suite(const VerifyOptions&) {
  const Mesh mesh = build_rect_mesh(4, 3, Box{Vec3::Zero(), Vec3(1, 1, 0)}, closed_tags());
  double worst = 0.0;
  for (double s : {0.0, 0.3, 1.0}) {
    const Discretization disc(mesh, reference_model(mesh.num_cells()));
    State st{CellField::Constant(mesh.num_cells(), 0.7), CellField::Constant(mesh.num_cells(), s)};
    const StepData step = disc.prepare(st, 0.0, 0.1);
    worst = std::max(worst, disc.residual(step, pack(st)).lpNorm<Eigen::Infinity>());
  }
  return {worst <= 1e-14, fmt::format("max residual {:.3e}", worst)};
}

SuiteOutcome scheme_conservativity_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 11);
  const Mesh mesh = build_rect_mesh(5, 4, Box{Vec3::Zero(), Vec3(1, 1, 0)}, mixed_tags());
  FluidModel model = reference_model(mesh.num_cells());
  model.gravity = Vec3(0.3, -1.0, 0.0);
  SourceModel src;
  src.injection.base = 0.2;
  src.production.base = 0.1;
  const Discretization disc(mesh, model, {}, src);
  double worst = 0.0;
  const int trials = opt.full ? 100 : 10;
  for (int t = 0; t < trials; ++t) {
    State old{random_field(rng, mesh.num_cells()), (random_field(rng, mesh.num_cells()).array() * 0.5 + 0.5).matrix()};
    State cur{random_field(rng, mesh.num_cells()), (random_field(rng, mesh.num_cells()).array() * 0.5 + 0.5).matrix()};
    const StepData step = disc.prepare(old, 0.0, 0.05);
    const Eigen::VectorXd full = disc.residual(step, pack(cur));
    const Eigen::VectorXd bare = disc.residual_without_interior(step, pack(cur));
    for (int eq = 0; eq < 2; ++eq) {
      double a = 0.0, b = 0.0, scale = 0.0;
      for (Index k = 0; k < mesh.num_cells(); ++k) {
        const double vol = mesh.cell(k).volume;
        a += vol * full[2 * k + eq];
        b += vol * bare[2 * k + eq];
        scale += vol * (std::abs(full[2 * k + eq]) + std::abs(bare[2 * k + eq]));
      }
      worst = std::max(worst, std::abs(a - b) / scale);
    }
  }
  return {worst <= 1e-12, fmt::format("max relative telescoping defect {:.3e}", worst)};
}

SuiteOutcome jacobian_suite(const VerifyOptions& opt) {
  Rng rng(opt.seed + 12);
  const Mesh mesh = build_rect_mesh(3, 3, Box{Vec3::Zero(), Vec3(1, 1, 0)}, mixed_tags());
  FluidModel model = reference_model(mesh.num_cells());
  model.gravity = Vec3(0.0, -1.0, 0.0);
  const Discretization disc(mesh, model);
  double worst = 0.0;
  const int trials = opt.full ? 50 : 10;
  for (int t = 0; t < trials; ++t) {
    State old{random_field(rng, 9), (random_field(rng, 9).array() * 0.4 + 0.5).matrix()};
    State cur{random_field(rng, 9), (random_field(rng, 9).array() * 0.4 + 0.5).matrix()};
    const StepData step = disc.prepare(old, 0.0, 0.1);
    const Eigen::MatrixXd A = Eigen::MatrixXd(disc.jacobian(step, pack(cur)));
    const Eigen::MatrixXd F = Eigen::MatrixXd(disc.jacobian_fd(step, pack(cur)));
    for (Index r = 0; r < A.rows(); ++r) {
      const double scale = std::max(A.row(r).cwiseAbs().maxCoeff(), 1e-300);
      worst = std::max(worst, (A.row(r) - F.row(r)).cwiseAbs().maxCoeff() / scale);
    }
  }
  return {worst < 1e-5, fmt::format("max row-relative mismatch {:.3e}", worst)};
}

SuiteOutcome max_principle_suite(const VerifyOptions& opt) {
  const Index n = opt.full ? 16 : 8;
  SideTags tags = closed_tags();
  tags[0] = BoundaryTag::water_injection;
  const Mesh mesh = build_rect_mesh(n, n, Box{Vec3::Zero(), Vec3(1, 1, 0)}, tags);
  SourceModel src;
  src.injection.bumps.push_back({Vec3(0.9, 0.9, 0.0), 2.0, 0.15});
  const Discretization disc(mesh, reference_model(mesh.num_cells()), {}, src);
  State init{CellField::Zero(mesh.num_cells()), CellField::Constant(mesh.num_cells(), 0.9)};
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.final_time = opt.full ? 0.5 : 0.1;
  const Trajectory tr = run_simulation(disc, init, cfg);
  double lo = 1.0, hi = 0.0;
  for (const auto& m : tr.monitors) {
    lo = std::min(lo, m.min_s);
    hi = std::max(hi, m.max_s);
  }
  const bool ok = !tr.aborted && lo >= -1e-10 && hi <= 1 + 1e-10;
  if (tr.aborted) return {false, fmt::format("aborted: {}", tr.abort_reason)};
  return {ok, fmt::format("s in [{:.3e}, {:.12f}] over {} steps", lo, hi, tr.monitors.size())};
}

SuiteOutcome fallback_suite(const VerifyOptions&) {
  SideTags tags = closed_tags();
  tags[0] = BoundaryTag::water_injection;
  const Mesh mesh = build_rect_mesh(4, 4, Box{Vec3::Zero(), Vec3(1, 1, 0)}, tags);
  SourceModel src;
  src.injection.base = 1.0;
  const Discretization disc(mesh, reference_model(mesh.num_cells()), {}, src);
  State init{CellField::Zero(mesh.num_cells()), CellField::Constant(mesh.num_cells(), 0.5)};
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.final_time = 0.05;
  cfg.newton_max_iter = 1;
  cfg.dt_min = 1e-4;
  const Trajectory tr = run_simulation(disc, init, cfg);
  // One Newton iteration per step cannot reach 1e-10 at dt = 0.05, so the
  // step must be halved at least once; either outcome of the cascade is legal.
  const bool ok = tr.failed_steps > 0 && (tr.aborted || std::abs(tr.monitors.back().time - 0.05) < 1e-15);
  return {ok, fmt::format("{} failed steps, {}", tr.failed_steps, tr.aborted ? "aborted at dt_min" : "recovered")};
}

}  // namespace

const std::vector<SuiteInfo>& verify_suites() {
  static const std::vector<SuiteInfo> suites{
      {"mesh", "duality", duality_suite},
      {"mesh", "norm_identity", norm_identity_suite},
      {"mesh", "poincare", poincare_suite},
      {"mesh", "partition", partition_suite},
      {"physics", "split_reconstruction", split_suite},
      {"physics", "beta_inverse", beta_suite},
      {"physics", "interface_density", interface_density_suite},
      {"physics", "energy_identity", energy_identity_suite},
      {"physics", "magic_inequality", magic_suite},
      {"physics", "h_nonnegative", h_nonnegative_suite},
      {"fluxes", "consistency", consistency_suite},
      {"fluxes", "conservativity", conservativity_suite},
      {"fluxes", "monotonicity", monotonicity_suite},
      {"fluxes", "coercivity", coercivity_suite},
      {"fluxes", "gravity", gravity_suite},
      {"scheme", "uniform_state", uniform_state_suite},
      {"scheme", "conservativity", scheme_conservativity_suite},
      {"scheme", "jacobian", jacobian_suite},
      {"solver", "max_principle", max_principle_suite},
      {"solver", "dt_fallback", fallback_suite},
  };
  return suites;
}

std::uint64_t verify_seed_from_env(std::uint64_t fallback) {
  if (const char* s = std::getenv("FVGW_SEED"); s && *s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return v;
  }
  return fallback;
}

bool suite_matches(const SuiteInfo& suite, const std::string& filter) {
  return filter.empty() || filter == suite.name || filter == suite.module || filter == suite.module + "." + suite.name;
}

std::vector<SuiteResult> run_verify(const VerifyOptions& options) {
  std::vector<SuiteResult> out;
  for (const SuiteInfo& suite : verify_suites()) {
    if (options.filter && !suite_matches(suite, *options.filter)) continue;
    SuiteResult r{suite.module, suite.name, false, {}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    try {
      const SuiteOutcome o = suite.run(options);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = fmt::format("exception: {}", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fvgw
