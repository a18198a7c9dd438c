#pragma once

// Fluid model for compressible gas / incompressible water flow written in
// global pressure p and gas saturation s, plus the derived scalar functions
// the scheme and its energy estimates are built from.

#include "fvgw/mesh.hpp"
#include "fvgw/scalar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fvgw {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Gas density laws rho(p). All are nondecreasing and bounded.

struct ConstantDensity {
  double value = 1.0;
};

/// rho_min + (rho_max - rho_min) (1 - exp(-rate max(p, 0))).
struct ExponentialDensity {
  double rho_min = 0.5;
  double rho_max = 1.5;
  double rate = 1.0;
};

/// rho_min + (rho_max - rho_min) / (1 + exp(-rate (p - midpoint))).
struct LogisticDensity {
  double rho_min = 0.5;
  double rho_max = 1.5;
  double rate = 1.0;
  double midpoint = 0.0;
};

/// clamp(intercept + slope p, rho_min, rho_max). Test-mode law.
struct LinearDensity {
  double intercept = 0.0;
  double slope = 1.0;
  double rho_min = 1.0;
  double rho_max = 3.0;
};

using DensityLaw = std::variant<ConstantDensity, ExponentialDensity, LogisticDensity, LinearDensity>;

class Density {
 public:
  explicit Density(DensityLaw law = ConstantDensity{});

  double value(double p) const;
  double derivative(double p) const;
  /// int_0^p rho.
  double primitive(double p) const;

  template <typename T>
  T operator()(const T& p) const {
    const double v = value_of(p);
    return chain(p, value(v), derivative(v));
  }

  template <typename T>
  T primitive(const T& p) const {
    const double v = value_of(p);
    return chain(p, primitive(v), value(v));
  }

  /// Mean of rho over [a, b]; rho(a) on a degenerate interval. Symmetric in
  /// its arguments bit for bit and clamped to [rho_min, rho_max].
  template <typename T>
  T interface_mean(const T& a, const T& b) const;

  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  bool is_constant() const { return std::holds_alternative<ConstantDensity>(law_); }
  /// Points where rho is not smooth.
  const std::vector<double>& kinks() const { return kinks_; }
  const DensityLaw& law() const { return law_; }
  std::string name() const;

 private:
  DensityLaw law_;
  double lower_ = 1.0;
  double upper_ = 1.0;
  std::vector<double> kinks_;
};

// ---------------------------------------------------------------------------
// Phase mobilities on [0, 1], extended by constants outside.

/// scale * s^exponent, or scale * (1 - s)^exponent when decreasing.
struct PowerMobility {
  double scale = 1.0;
  double exponent = 2.0;
  bool decreasing = false;
};

/// sum_i c_i s^i.
struct PolynomialMobility {
  std::vector<double> coefficients;
};

using MobilityLaw = std::variant<PowerMobility, PolynomialMobility>;

class Mobility {
 public:
  explicit Mobility(MobilityLaw law = PowerMobility{});

  double value(double s) const;
  /// Derivative of the extended function (zero outside [0, 1]).
  double derivative(double s) const;

  template <typename T>
  T operator()(const T& s) const {
    const double v = value_of(s);
    return chain(s, value(v), derivative(v));
  }

  const MobilityLaw& law() const { return law_; }
  std::string name() const;

 private:
  MobilityLaw law_;
};

/// Splits f = sign * M into a nondecreasing part f_up and a nonincreasing part
/// f_down with f_up(0) = f_down(0) = 0, so f_up + f_down + f(0) = f.
class MonotoneSplit {
 public:
  MonotoneSplit(const Mobility& mobility, double sign = 1.0);

  double up(double z) const;
  double down(double z) const;

  template <typename T>
  T up(const T& z) const {
    return evaluate(z, true);
  }
  template <typename T>
  T down(const T& z) const {
    return evaluate(z, false);
  }

  double at_zero() const { return sign_ * mobility_.value(0.0); }
  bool nondecreasing() const;
  bool nonincreasing() const;
  const std::vector<double>& breakpoints() const { return breaks_; }

 private:
  struct Segment {
    double lo, hi;
    bool increasing;
    double up_before, down_before;  // accumulated parts at lo
  };

  double f(double z) const { return sign_ * mobility_.value(z); }
  double fprime(double z) const { return sign_ * mobility_.derivative(z); }

  template <typename T>
  T evaluate(const T& z, bool want_up) const {
    const double zv = std::clamp(value_of(z), 0.0, 1.0);
    const Segment& seg = locate(zv);
    const double base = want_up ? seg.up_before : seg.down_before;
    if (seg.increasing != want_up || value_of(z) < 0.0 || value_of(z) > 1.0) {
      // Either this part is frozen on the segment or z is outside [0, 1].
      const double frozen = want_up == seg.increasing ? base + (f(zv) - f(seg.lo)) : base;
      return constant_like(z, frozen);
    }
    return chain(z, base + (f(zv) - f(seg.lo)), fprime(zv));
  }

  const Segment& locate(double z) const;

  Mobility mobility_;
  double sign_;
  std::vector<double> breaks_;
  std::vector<Segment> segments_;
};

// ---------------------------------------------------------------------------
// Capillary diffusion alpha(s) and its Kirchhoff transform beta.

/// alpha(s) = sum_i c_i s^i; closed-form beta and B.
struct PolynomialCapillary {
  std::vector<double> coefficients;
};

/// alpha(s) = scale * s^exponent; closed-form beta and B.
struct PowerCapillary {
  double scale = 1.0;
  double exponent = 1.0;
};

/// alpha(s) = scale * (1 - exp(-rate s)); beta and B by adaptive quadrature.
struct SaturatingCapillary {
  double scale = 1.0;
  double rate = 5.0;
};

using CapillaryLaw = std::variant<PolynomialCapillary, PowerCapillary, SaturatingCapillary>;

class Capillary {
 public:
  /// offset > 0 adds a constant to alpha on [0, 1] (test mode: alpha(0) != 0).
  explicit Capillary(CapillaryLaw law = PowerCapillary{}, double offset = 0.0);

  /// alpha extended by 0 below 0 and by alpha(1) above 1.
  double alpha(double s) const;
  double beta(double s) const;
  double big_B(double s) const;
  /// Inverse of beta on [0, beta(1)]; throws ModelError outside.
  double beta_inverse(double v) const;

  template <typename T>
  T beta(const T& s) const {
    const double v = value_of(s);
    return chain(s, beta(v), alpha(v));
  }
  template <typename T>
  T big_B(const T& s) const {
    const double v = value_of(s);
    return chain(s, big_B(v), beta(v));
  }

  double offset() const { return offset_; }
  bool tabulated() const { return std::holds_alternative<SaturatingCapillary>(law_); }
  const CapillaryLaw& law() const { return law_; }
  std::string name() const;

 private:
  double alpha01(double s) const;  // law only, s in [0, 1]
  double beta01(double s) const;
  double q01(double s) const;      // int_0^s r alpha(r) dr

  CapillaryLaw law_;
  double offset_ = 0.0;
  // Tabulated laws: node values of beta and q on a uniform grid.
  std::vector<double> beta_table_;
  std::vector<double> q_table_;
  double alpha_one_ = 0.0;
  double beta_one_ = 0.0;
  double B_one_ = 0.0;
};

/// int_a^b f to 1e-12 absolute by adaptive Simpson.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

// ---------------------------------------------------------------------------

struct FluidModel {
  Density density;
  double water_density = 1.0;
  Mobility gas_mobility{PowerMobility{1.0, 2.0, false}};
  Mobility water_mobility{PowerMobility{1.0, 2.0, true}};
  double total_mobility_floor = 0.5;  // m0
  Capillary capillary;
  CellField porosity;      // per cell
  CellField permeability;  // per cell, empty means k = 1
  Vec3 gravity = Vec3::Zero();
  /// Set for deliberately non-physical parameter choices (e.g. alpha(0) > 0).
  bool test_mode = false;
};

/// Immutable bundle of every derived scalar function used by the scheme.
class DerivedFunctions {
 public:
  explicit DerivedFunctions(const FluidModel& model);

  const Density& density() const { return density_; }
  const Mobility& gas_mobility() const { return gas_mobility_; }
  const Mobility& water_mobility() const { return water_mobility_; }
  const Capillary& capillary() const { return capillary_; }
  double water_density() const { return water_density_; }
  double total_mobility_floor() const { return m0_; }

  /// Split of -M1 (gas) and M2 (water), the signed forms used by the fluxes.
  const MonotoneSplit& gas_split() const { return gas_split_; }
  const MonotoneSplit& water_split() const { return water_split_; }

  template <typename T>
  T beta(const T& s) const {
    return capillary_.beta(s);
  }
  double beta_inverse(double v) const { return capillary_.beta_inverse(v); }
  template <typename T>
  T big_B(const T& s) const {
    return capillary_.big_B(s);
  }

  /// g with g' = -rho and g(0) = 0.
  template <typename T>
  T g_aux(const T& p) const {
    return -density_.primitive(p);
  }
  /// H(p) = g(p) + rho(p) p.
  template <typename T>
  T big_H(const T& p) const {
    return g_aux(p) + density_(p) * p;
  }
  template <typename T>
  T interface_density(const T& pK, const T& pL) const {
    return density_.interface_mean(pK, pL);
  }

 private:
  Density density_;
  Mobility gas_mobility_;
  Mobility water_mobility_;
  Capillary capillary_;
  double water_density_;
  double m0_;
  MonotoneSplit gas_split_;
  MonotoneSplit water_split_;
};

double beta(const DerivedFunctions& fn, double s);
double beta_inverse(const DerivedFunctions& fn, double v);
double big_B(const DerivedFunctions& fn, double s);
double g_aux(const DerivedFunctions& fn, double p);
double big_H(const DerivedFunctions& fn, double p);
double interface_density(const DerivedFunctions& fn, double pK, double pL);

/// (f_up, f_down) of a mobility, f = sign * M.
std::pair<MonotoneSplit, MonotoneSplit> mobility_split(const Mobility& mobility);

// ---------------------------------------------------------------------------

struct HypothesisCheck {
  std::string id;
  std::string description;
  bool pass = true;
  double worst_violation = 0.0;
  double location = 0.0;
  std::optional<double> estimate;  // Hoelder exponent for H4
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  bool all_pass() const;
  const HypothesisCheck& at(const std::string& id) const;
};

/// Checks porosity (H1), permeability, mobilities (H3), capillarity (H4) and
/// density (H6) by sampling. Throws ModelError on non-finite values.
HypothesisReport validate_hypotheses(const FluidModel& model, std::pair<double, double> pressure_range,
                                     int n_samples);

/// Empirical Hoelder exponent of beta^{-1} near 0 (dyadic ratios).
double estimate_holder_exponent(const Capillary& capillary);

// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::array<double, 4> kGaussNodes{0.183434642495649804939476142360184,
                                                   0.525532409916328985817739049189254,
                                                   0.796666477413626739591553936475830,
                                                   0.960289856497536231683560868569473};
inline constexpr std::array<double, 4> kGaussWeights{0.362683783378361982965150449277195,
                                                     0.313706645877887287337962201986601,
                                                     0.222381034453374470544355994426241,
                                                     0.101228536290376259152531354309962};

}  // namespace detail

template <typename T>
T Density::interface_mean(const T& a, const T& b) const {
  if (is_constant()) return constant_like(a, lower_);
  const bool ordered = value_of(a) <= value_of(b);
  const T& lo = ordered ? a : b;
  const T& hi = ordered ? b : a;
  const double lo_v = value_of(lo);
  const double hi_v = value_of(hi);
  const double width = hi_v - lo_v;
  const double scale = std::max({1.0, std::abs(lo_v), std::abs(hi_v)});

  T mean;
  if (width <= 1e-12 * scale) {
    mean = (*this)(T(0.5 * (lo + hi)));
  } else if (width < 1e-3 * scale) {
    // Short interval: Gauss-Legendre on the smooth pieces, avoiding the
    // cancellation of the primitive difference.
    std::vector<double> cuts;
    for (double k : kinks_)
      if (k > lo_v && k < hi_v) cuts.push_back(k);
    T acc = constant_like(lo, 0.0);
    T left = lo;
    for (std::size_t piece = 0; piece <= cuts.size(); ++piece) {
      const T right = piece < cuts.size() ? constant_like(lo, cuts[piece]) : T(hi);
      const T mid = 0.5 * (left + right);
      const T half = 0.5 * (right - left);
      T sub = constant_like(lo, 0.0);
      for (std::size_t i = 0; i < detail::kGaussNodes.size(); ++i) {
        const T up = (*this)(T(mid + half * detail::kGaussNodes[i]));
        const T dn = (*this)(T(mid - half * detail::kGaussNodes[i]));
        sub += detail::kGaussWeights[i] * (up + dn);
      }
      acc += half * sub;
      left = right;
    }
    mean = acc / (hi - lo);
  } else {
    mean = (primitive(hi) - primitive(lo)) / (hi - lo);
  }
  const double mv = value_of(mean);
  if (mv < lower_) return with_value(mean, lower_);
  if (mv > upper_) return with_value(mean, upper_);
  return mean;
}

}  // namespace fvgw
