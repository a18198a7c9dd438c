#pragma once

// Monotone upwind convection fluxes G1/G2, upwind gravity fluxes F1/F2, and
// the harmonic face coefficient for heterogeneous permeability.

#include "fvgw/physics.hpp"

namespace fvgw {

/// Deliberate defects used by the mutation check of the verify command.
enum class FluxFault { none, g2_sign };

void set_flux_fault(FluxFault fault);
FluxFault flux_fault();

class FluxKernel {
 public:
  explicit FluxKernel(const DerivedFunctions& functions);

  /// G1(a,b;c) = -M1(b) c+ + M1(a) c-.
  template <typename T>
  T G1(const T& a, const T& b, const T& c) const {
    const T cp = positive_part(c);
    const T cm = negative_part(c);
    if (explicit_gas_) return -fn_->gas_mobility()(b) * cp + fn_->gas_mobility()(a) * cm;
    return split_flux(fn_->gas_split(), a, b, cp, cm);
  }

  /// G2(a,b;c) = M2(b) c+ - M2(a) c-.
  template <typename T>
  T G2(const T& a, const T& b, const T& c) const {
    const T cp = positive_part(c);
    const T cm = negative_part(c);
    const double fault = fault_ == FluxFault::g2_sign ? -1.0 : 1.0;
    if (explicit_water_) return fn_->water_mobility()(b) * cp - fault * (fn_->water_mobility()(a) * cm);
    const MonotoneSplit& f = fn_->water_split();
    return cp * (f.up(a) + f.down(b) + f.at_zero()) - fault * (cm * (f.up(b) + f.down(a) + f.at_zero()));
  }

  /// Upwind flux c+ f(a, b) - c- f(b, a) from a monotone split of the mobility.
  template <typename T>
  static T split_flux(const MonotoneSplit& f, const T& a, const T& b, const T& cp, const T& cm) {
    return cp * (f.up(a) + f.down(b) + f.at_zero()) - cm * (f.up(b) + f.down(a) + f.at_zero());
  }

  /// (G2 - G1)(a,b;c) c - m0 c^2.
  double coercivity_gap(double a, double b, double c) const;

  bool explicit_gas() const { return explicit_gas_; }
  bool explicit_water() const { return explicit_water_; }
  const DerivedFunctions& functions() const { return *fn_; }

 private:

  const DerivedFunctions* fn_;
  bool explicit_gas_;
  bool explicit_water_;
  FluxFault fault_;
};

/// g_{K,L} = |sigma| (g . eta_{K,L})+ and g_{L,K} = |sigma| (g . eta_{K,L})-.
struct FaceGravity {
  double forward = 0.0;
  double backward = 0.0;

  FaceGravity reversed() const { return {backward, forward}; }
  FaceGravity scaled(double k) const { return {k * forward, k * backward}; }
};

FaceGravity face_gravity(const Vec3& gravity, const Vec3& normal, double area);

/// F1_{K,L} = rho^2(pK) M1(sK) g_{K,L} - rho^2(pL) M1(sL) g_{L,K}.
template <typename T>
T gravity_flux_F1(const DerivedFunctions& fn, const T& pK, const T& pL, const T& sK, const T& sL,
                  const FaceGravity& g) {
  T out = constant_like(pK, 0.0);
  if (g.forward != 0.0) {
    const T rho = fn.density()(pK);
    out += rho * rho * fn.gas_mobility()(sK) * g.forward;
  }
  if (g.backward != 0.0) {
    const T rho = fn.density()(pL);
    out -= rho * rho * fn.gas_mobility()(sL) * g.backward;
  }
  return out;
}

/// F2_{K,L} = rho2 M2(sL) g_{K,L} - rho2 M2(sK) g_{L,K}.
template <typename T>
T gravity_flux_F2(const DerivedFunctions& fn, const T& sK, const T& sL, const FaceGravity& g) {
  T out = constant_like(sK, 0.0);
  if (g.forward != 0.0) out += fn.water_density() * fn.water_mobility()(sL) * g.forward;
  if (g.backward != 0.0) out -= fn.water_density() * fn.water_mobility()(sK) * g.backward;
  return out;
}

/// d*_{K,L} = kK kL d_{K,L} / (d_{K,sigma} kK + d_{L,sigma} kL).
double harmonic_transmissibility(double kK, double kL, double d_K_sigma, double d_L_sigma, double d_KL);

}  // namespace fvgw
