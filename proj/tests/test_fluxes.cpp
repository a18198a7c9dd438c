#include "fvgw/fluxes.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fvgw;

namespace {

FluidModel model() {
  FluidModel m;
  m.density = Density(ExponentialDensity{0.5, 1.5, 1.0});
  m.capillary = Capillary(PowerCapillary{1.0, 1.0});
  return m;
}

FluidModel wavy_model() {
  FluidModel m = model();
  m.water_mobility = Mobility(PolynomialMobility{{0.30, 0.4, -0.7}});
  m.gas_mobility = Mobility(PolynomialMobility{{0.0, 1.0, -0.5}});
  m.total_mobility_floor = 0.2;
  return m;
}

}  // namespace

TEST(G1, Examples) {
  const DerivedFunctions fn(model());
  const FluxKernel k(fn);
  EXPECT_TRUE(k.explicit_gas());
  EXPECT_DOUBLE_EQ(k.G1(0.2, 0.8, 1.0), -0.64);
  EXPECT_DOUBLE_EQ(k.G1(0.2, 0.8, -1.0), 0.04);
  EXPECT_EQ(k.G1(0.2, 0.8, 0.0), 0.0);
  for (double a : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(k.G1(a, a, 2.5), -a * a * 2.5);
}

TEST(G2, Examples) {
  const DerivedFunctions fn(model());
  const FluxKernel k(fn);
  EXPECT_TRUE(k.explicit_water());
  EXPECT_NEAR(k.G2(0.2, 0.8, 1.0), 0.04, 1e-15);
  EXPECT_NEAR(k.G2(0.2, 0.8, -1.0), -0.64, 1e-15);
  EXPECT_EQ(k.G2(0.2, 0.8, 0.0), 0.0);
  for (double a : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(k.G2(a, a, -1.5), (1 - a) * (1 - a) * -1.5);
}

TEST(G, SplitPathAgreesWithExplicitForMonotoneMobilities) {
  const DerivedFunctions fn(model());
  const FluxKernel k(fn);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> S(-0.1, 1.1), C(-3, 3);
  for (int i = 0; i < 1000; ++i) {
    const double a = S(rng), b = S(rng), c = C(rng);
    const double cp = std::max(c, 0.0), cm = std::max(-c, 0.0);
    const MonotoneSplit g1(fn.gas_mobility(), -1.0);
    EXPECT_NEAR(FluxKernel::split_flux(g1, a, b, cp, cm), k.G1(a, b, c), 1e-14);
    EXPECT_NEAR(FluxKernel::split_flux(fn.water_split(), a, b, cp, cm), k.G2(a, b, c), 1e-14);
  }
}

TEST(G, HypothesesOnNonMonotoneMobilities) {
  const DerivedFunctions fn(wavy_model());
  const FluxKernel k(fn);
  EXPECT_FALSE(k.explicit_water());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> S(0, 1), C(-3, 3);
  for (int i = 0; i < 5000; ++i) {
    const double a = S(rng), b = S(rng), c = C(rng);
    EXPECT_NEAR(k.G2(a, a, c), fn.water_mobility().value(a) * c, 1e-12);
    EXPECT_NEAR(k.G1(a, a, c), -fn.gas_mobility().value(a) * c, 1e-12);
    EXPECT_EQ(k.G2(a, b, c), -k.G2(b, a, -c));
    EXPECT_EQ(k.G1(a, b, c), -k.G1(b, a, -c));
    const double da = S(rng) * (1 - a);
    EXPECT_GE(k.G2(a + da, b, c) - k.G2(a, b, c), -1e-12);
    EXPECT_GE(k.G1(a, b, c) - k.G1(a, b + S(rng) * (1 - b), c), -1e-12);
    EXPECT_GE(k.coercivity_gap(a, b, c), -1e-12 * c * c);
  }
}

TEST(Coercivity, Examples) {
  const DerivedFunctions fn(model());
  const FluxKernel k(fn);
  EXPECT_EQ(k.coercivity_gap(0.3, 0.6, 0.0), 0.0);
  EXPECT_NEAR(k.coercivity_gap(0.5, 0.5, 1.0), 0.0, 1e-15);
}

TEST(Fault, G2SignBreaksConservativity) {
  const DerivedFunctions fn(model());
  set_flux_fault(FluxFault::g2_sign);
  const FluxKernel broken(fn);
  set_flux_fault(FluxFault::none);
  const FluxKernel k(fn);
  EXPECT_EQ(k.G2(0.2, 0.8, 1.0), -k.G2(0.8, 0.2, -1.0));
  EXPECT_NE(broken.G2(0.2, 0.8, 1.0), -broken.G2(0.8, 0.2, -1.0));
}

TEST(Gravity, FaceGravityOrientation) {
  const FaceGravity g = face_gravity(Vec3(0, -2, 0), Vec3(0, -1, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.forward, 1.0);
  EXPECT_DOUBLE_EQ(g.backward, 0.0);
  const FaceGravity r = face_gravity(Vec3(0, -2, 0), Vec3(0, 1, 0), 0.5);
  EXPECT_EQ(r.forward, g.reversed().forward);
  EXPECT_EQ(r.backward, g.reversed().backward);
}

TEST(Gravity, ZeroGravityGivesZeroFlux) {
  const DerivedFunctions fn(model());
  const FaceGravity g = face_gravity(Vec3::Zero(), Vec3(1, 0, 0), 1.0);
  EXPECT_EQ(gravity_flux_F1(fn, 0.3, -0.2, 0.4, 0.9, g), 0.0);
  EXPECT_EQ(gravity_flux_F2(fn, 0.4, 0.9, g), 0.0);
}

TEST(Gravity, UniformStateUpwind) {
  const DerivedFunctions fn(model());
  const FaceGravity g{0.7, 0.0};
  const double p = 0.4, s = 0.6;
  const double rho = fn.density().value(p);
  EXPECT_NEAR(gravity_flux_F1(fn, p, p, s, s, g), rho * rho * s * s * 0.7, 1e-15);
  EXPECT_NEAR(gravity_flux_F2(fn, s, s, g), 1.0 * (1 - s) * (1 - s) * 0.7, 1e-15);
}

TEST(Gravity, AntisymmetryAndF2Monotonicity) {
  const DerivedFunctions fn(model());
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1), P(-2, 2);
  for (int i = 0; i < 5000; ++i) {
    const FaceGravity g = face_gravity(Vec3(P(rng), P(rng), 0), Vec3(1, 0, 0), U(rng));
    const double pK = P(rng), pL = P(rng), sK = U(rng), sL = U(rng);
    EXPECT_EQ(gravity_flux_F1(fn, pK, pL, sK, sL, g) + gravity_flux_F1(fn, pL, pK, sL, sK, g.reversed()), 0.0);
    EXPECT_EQ(gravity_flux_F2(fn, sK, sL, g) + gravity_flux_F2(fn, sL, sK, g.reversed()), 0.0);
    const double ds = U(rng) * (1 - std::max(sK, sL));
    EXPECT_GE(gravity_flux_F2(fn, sK + ds, sL, g) - gravity_flux_F2(fn, sK, sL, g), -1e-12);
    EXPECT_LE(gravity_flux_F2(fn, sK, sL + ds, g) - gravity_flux_F2(fn, sK, sL, g), 1e-12);
  }
}

TEST(Transmissibility, Examples) {
  EXPECT_DOUBLE_EQ(harmonic_transmissibility(1, 1, 0.3, 0.7, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(harmonic_transmissibility(1, 3, 0.5, 0.5, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(harmonic_transmissibility(2.5, 2.5, 0.2, 0.2, 0.4), 2.5);
  EXPECT_DOUBLE_EQ(harmonic_transmissibility(1, 3, 0.2, 0.6, 0.8), harmonic_transmissibility(3, 1, 0.6, 0.2, 0.8));
  EXPECT_THROW(harmonic_transmissibility(0.0, 1, 0.5, 0.5, 1.0), ModelError);
  EXPECT_THROW(harmonic_transmissibility(1, 1, 0.0, 0.5, 1.0), ModelError);
}
