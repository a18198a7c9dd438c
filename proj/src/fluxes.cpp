#include "fvgw/fluxes.hpp"

#include <fmt/format.h>

#include <atomic>

namespace fvgw {

namespace {
std::atomic<FluxFault> g_fault{FluxFault::none};
}

void set_flux_fault(FluxFault fault) { g_fault.store(fault); }
FluxFault flux_fault() { return g_fault.load(); }

FluxKernel::FluxKernel(const DerivedFunctions& functions)
    : fn_(&functions),
      // gas_split is the split of -M1, water_split that of M2
      explicit_gas_(functions.gas_split().nonincreasing()),
      explicit_water_(functions.water_split().nonincreasing()),
      fault_(flux_fault()) {}

double FluxKernel::coercivity_gap(double a, double b, double c) const {
  return (G2(a, b, c) - G1(a, b, c)) * c - fn_->total_mobility_floor() * c * c;
}

FaceGravity face_gravity(const Vec3& gravity, const Vec3& normal, double area) {
  const double gn = gravity.dot(normal);
  return {area * std::max(gn, 0.0), area * std::max(-gn, 0.0)};
}

double harmonic_transmissibility(double kK, double kL, double d_K_sigma, double d_L_sigma, double d_KL) {
  if (!(kK > 0.0) || !(kL > 0.0))
    throw ModelError(fmt::format("permeability must be positive (got {}, {})", kK, kL));
  if (!(d_K_sigma > 0.0) || !(d_L_sigma > 0.0) || !(d_KL > 0.0))
    throw ModelError("face distances must be positive");
  return kK * kL * d_KL / (d_K_sigma * kK + d_L_sigma * kL);
}

}  // namespace fvgw
