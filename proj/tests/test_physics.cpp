#include "fvgw/physics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fvgw;

namespace {

FluidModel quadratic_model(double m0) {
  FluidModel m;
  m.density = Density(ExponentialDensity{0.5, 1.5, 1.0});
  m.total_mobility_floor = m0;
  m.capillary = Capillary(PowerCapillary{1.0, 1.0});
  m.porosity = CellField::Constant(4, 0.3);
  return m;
}

Capillary bell_capillary() { return Capillary(PolynomialCapillary{{0.0, 2.0, -2.0}}); }  // 2s(1-s)

std::vector<Density> density_laws() {
  return {Density(ConstantDensity{1.3}), Density(ExponentialDensity{0.5, 1.5, 2.0}),
          Density(LogisticDensity{0.2, 0.6, 1.5, -1.0}), Density(LinearDensity{2.0, 0.5, 1.0, 3.0})};
}

}  // namespace

TEST(Hypotheses, TotalMobilityFloor) {
  const auto ok = validate_hypotheses(quadratic_model(0.5), {-10, 10}, 1001);
  EXPECT_TRUE(ok.at("H3").pass);
  const auto bad = validate_hypotheses(quadratic_model(0.6), {-10, 10}, 1001);
  EXPECT_FALSE(bad.at("H3").pass);
  EXPECT_NEAR(bad.at("H3").location, 0.5, 1e-3);
  EXPECT_NEAR(bad.at("H3").worst_violation, 0.1, 1e-6);
}

TEST(Hypotheses, ConstantDensityIsBounded) {
  FluidModel m = quadratic_model(0.5);
  m.density = Density(ConstantDensity{1.0});
  EXPECT_TRUE(validate_hypotheses(m, {-10, 10}, 1001).at("H6").pass);
}

TEST(Hypotheses, NegativeCapillarityFails) {
  FluidModel m = quadratic_model(0.5);
  m.capillary = Capillary(PolynomialCapillary{{0.0, -1.0}});
  const auto rep = validate_hypotheses(m, {-10, 10}, 1001);
  EXPECT_FALSE(rep.at("H4").pass);
  EXPECT_FALSE(rep.all_pass());
}

TEST(Hypotheses, DegenerateBellCapillarityFails) {
  // 2s(1-s) vanishes at s = 1, which (0,1] excludes
  FluidModel m = quadratic_model(0.5);
  m.capillary = bell_capillary();
  EXPECT_FALSE(validate_hypotheses(m, {-10, 10}, 1001).at("H4").pass);
}

TEST(Hypotheses, HolderExponentReported) {
  const auto rep = validate_hypotheses(quadratic_model(0.5), {-10, 10}, 1001);
  ASSERT_TRUE(rep.at("H4").estimate.has_value());
  // beta = s^2 / 2, so beta^{-1} is Hoelder of order 1/2
  EXPECT_NEAR(*rep.at("H4").estimate, 0.5, 1e-3);
}

TEST(Hypotheses, NonFiniteIsHardFailure) {
  FluidModel m = quadratic_model(0.5);
  m.porosity[2] = std::nan("");
  EXPECT_THROW(validate_hypotheses(m, {-10, 10}, 101), ModelError);
}

TEST(Hypotheses, NonpositivePorosityFails) {
  FluidModel m = quadratic_model(0.5);
  m.porosity[1] = 0.0;
  EXPECT_FALSE(validate_hypotheses(m, {-10, 10}, 101).at("H1").pass);
}

TEST(Capillary, BellClosedForms) {
  const Capillary c = bell_capillary();
  EXPECT_EQ(c.beta(0.0), 0.0);
  EXPECT_EQ(c.big_B(0.0), 0.0);
  EXPECT_NEAR(c.beta(1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.big_B(1.0), 1.0 / 6.0, 1e-15);
  const double s = 0.37;
  EXPECT_NEAR(c.beta(s), s * s - 2.0 / 3.0 * s * s * s, 1e-15);
  EXPECT_NEAR(c.beta_inverse(c.beta(s)), s, 1e-8);
}

TEST(Capillary, BetaInverseDomain) {
  const Capillary c = bell_capillary();
  EXPECT_THROW(c.beta_inverse(-1e-3), ModelError);
  EXPECT_THROW(c.beta_inverse(0.34), ModelError);
}

TEST(Capillary, SaturatingTableMatchesQuadrature) {
  const Capillary c(SaturatingCapillary{0.7, 4.0});
  auto alpha = [](double z) { return 0.7 * (1.0 - std::exp(-4.0 * z)); };
  for (double s : {0.013, 0.25, 0.5, 0.91, 1.0}) {
    const double beta = adaptive_simpson(alpha, 0.0, s);
    EXPECT_NEAR(c.beta(s), beta, 1e-12);
    const double B = adaptive_simpson([&](double r) { return adaptive_simpson(alpha, 0.0, r, 1e-14); }, 0.0, s);
    EXPECT_NEAR(c.big_B(s), B, 1e-11);
    EXPECT_NEAR(c.beta_inverse(c.beta(s)), s, 1e-8);
  }
}

TEST(Capillary, ExtensionOutsideUnitInterval) {
  const Capillary c(PowerCapillary{2.0, 1.0});  // alpha = 2s, beta = s^2
  EXPECT_EQ(c.alpha(-0.5), 0.0);
  EXPECT_EQ(c.beta(-0.5), 0.0);
  EXPECT_EQ(c.alpha(1.5), 2.0);
  EXPECT_NEAR(c.beta(1.5), 1.0 + 2.0 * 0.5, 1e-15);
  // B(1.5) = B(1) + beta(1) 0.5 + alpha(1) 0.5^2 / 2
  EXPECT_NEAR(c.big_B(1.5), 1.0 / 3.0 + 0.5 + 0.25, 1e-15);
}

TEST(Density, ConstantLaw) {
  FluidModel m = quadratic_model(0.5);
  m.density = Density(ConstantDensity{2.0});
  const DerivedFunctions fn(m);
  for (double p : {-3.0, 0.0, 1.7}) {
    EXPECT_NEAR(fn.g_aux(p), -2.0 * p, 1e-15);
    EXPECT_NEAR(fn.big_H(p), 0.0, 1e-15);
    EXPECT_EQ(fn.interface_density(p, 0.4), 2.0);
  }
}

TEST(Density, HNormalizationAndSign) {
  for (const Density& d : density_laws()) {
    FluidModel m = quadratic_model(0.5);
    m.density = d;
    const DerivedFunctions fn(m);
    EXPECT_EQ(fn.big_H(0.0), 0.0) << d.name();
    for (int i = 0; i <= 2000; ++i) EXPECT_GE(fn.big_H(-10.0 + 0.01 * i), -1e-12) << d.name();
  }
}

TEST(Density, PrimitiveMatchesQuadrature) {
  for (const Density& d : density_laws()) {
    for (double p : {-4.0, -0.3, 0.0, 0.8, 5.0}) {
      double expected = 0.0;
      // split at the kinks so the quadrature sees smooth pieces
      std::vector<double> pts{0.0, p};
      for (double k : d.kinks())
        if ((k - 0.0) * (k - p) < 0.0) pts.insert(pts.begin() + 1, k);
      for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        expected += adaptive_simpson([&](double z) { return d.value(z); }, pts[i], pts[i + 1]);
      EXPECT_NEAR(d.primitive(p), expected, 1e-11) << d.name() << " p=" << p;
    }
  }
}

TEST(InterfaceDensity, Examples) {
  FluidModel m = quadratic_model(0.5);
  const DerivedFunctions exp_fn(m);
  EXPECT_EQ(exp_fn.interface_density(3.0, 3.0), exp_fn.density().value(3.0));
  m.density = Density(LinearDensity{0.0, 1.0, 1.0, 3.0});
  const DerivedFunctions lin(m);
  EXPECT_NEAR(lin.interface_density(1.0, 3.0), 2.0, 1e-14);
}

TEST(InterfaceDensity, SymmetricBoundedAndEnergyIdentity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-10, 10), tiny(-1e-9, 1e-9);
  for (const Density& d : density_laws()) {
    FluidModel m = quadratic_model(0.5);
    m.density = d;
    const DerivedFunctions fn(m);
    for (int i = 0; i < 2000; ++i) {
      const double a = U(rng);
      const double b = i % 5 == 0 ? a + tiny(rng) : U(rng);
      const double r = fn.interface_density(a, b);
      EXPECT_EQ(r, fn.interface_density(b, a));
      EXPECT_GE(r, d.lower_bound());
      EXPECT_LE(r, d.upper_bound());
      const double lhs = r * (b - a);
      const double gap = lhs + fn.g_aux(b) - fn.g_aux(a);
      EXPECT_LE(std::abs(gap), 1e-10 * std::max({std::abs(lhs), std::abs(fn.g_aux(a)), std::abs(fn.g_aux(b)), 1e-300}));
    }
  }
}

TEST(Split, MonotoneInputs) {
  const MonotoneSplit s2(Mobility(PowerMobility{1.0, 2.0, false}));
  const MonotoneSplit d2(Mobility(PowerMobility{1.0, 2.0, true}));
  EXPECT_TRUE(s2.nondecreasing());
  EXPECT_TRUE(d2.nonincreasing());
  for (double s : {0.0, 0.3, 0.8, 1.0}) {
    EXPECT_NEAR(s2.up(s), s * s, 1e-15);
    EXPECT_EQ(s2.down(s), 0.0);
    EXPECT_EQ(d2.up(s), 0.0);
    EXPECT_NEAR(d2.down(s), (1 - s) * (1 - s) - 1.0, 1e-15);
    EXPECT_NEAR(d2.up(s) + d2.down(s) + d2.at_zero(), (1 - s) * (1 - s), 1e-15);
  }
}

TEST(Split, NonMonotoneAgainstQuadrature) {
  const Mobility bump(PolynomialMobility{{0.0, 1.0, -1.0}});  // s(1-s)
  const MonotoneSplit split(bump);
  EXPECT_FALSE(split.nondecreasing());
  EXPECT_FALSE(split.nonincreasing());
  for (double s : {0.25, 0.5, 0.75}) {
    const double up = adaptive_simpson([](double z) { return std::max(1.0 - 2.0 * z, 0.0); }, 0.0, s);
    const double down = -adaptive_simpson([](double z) { return std::max(2.0 * z - 1.0, 0.0); }, 0.0, s);
    EXPECT_NEAR(split.up(s), up, 1e-10);
    EXPECT_NEAR(split.down(s), down, 1e-10);
    const double m = std::min(s, 0.5);
    EXPECT_NEAR(split.up(s), m - m * m, 1e-12);
  }
}

TEST(Split, ReconstructionDense) {
  const Mobility wavy(PolynomialMobility{{0.3, 0.4, -0.7}});
  const MonotoneSplit split(wavy);
  for (int i = 0; i <= 10000; ++i) {
    const double s = i / 10000.0;
    EXPECT_NEAR(split.up(s) + split.down(s) + split.at_zero(), wavy.value(s), 1e-10);
  }
}

TEST(Mobility, ConstantExtension) {
  const Mobility m1(PowerMobility{1.0, 2.0, false});
  EXPECT_EQ(m1.value(-0.2), 0.0);
  EXPECT_EQ(m1.value(1.3), 1.0);
  EXPECT_EQ(m1.derivative(1.3), 0.0);
  EXPECT_EQ(m1.derivative(-0.2), 0.0);
}

TEST(Magic, InequalitySampled) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> P(-10, 10), S(0, 1);
  for (const Density& d : density_laws()) {
    FluidModel m = quadratic_model(0.5);
    m.density = d;
    const DerivedFunctions fn(m);
    for (int i = 0; i < 2000; ++i) {
      const double p = P(rng), ps = P(rng), s = S(rng), ss = S(rng);
      const double lhs = (d.value(p) * s - d.value(ps) * ss) * p + (s - ss) * (fn.big_H(p) - d.value(p) * p);
      const double rhs = fn.big_H(p) * s - fn.big_H(ps) * ss;
      EXPECT_GE(lhs - rhs, -1e-10 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
  }
}

TEST(DerivedFunctions, RejectsBadConstants) {
  FluidModel m = quadratic_model(0.5);
  m.water_density = 0.0;
  EXPECT_THROW(DerivedFunctions{m}, ModelError);
  m = quadratic_model(0.0);
  EXPECT_THROW(DerivedFunctions{m}, ModelError);
}
