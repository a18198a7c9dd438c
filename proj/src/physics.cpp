#include "fvgw/physics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace fvgw {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double polyval(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double polyder(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 1;) acc = acc * s + static_cast<double>(i) * c[i];
  return acc;
}

void require_finite(double v, const char* function, double input) {
  if (!std::isfinite(v)) throw ModelError(fmt::format("{} is not finite at {}", function, input));
}

}  // namespace

// ---------------------------------------------------------------------------
// Density

Density::Density(DensityLaw law) : law_(std::move(law)) {
  std::visit(overloaded{
                 [&](const ConstantDensity& l) {
                   if (!(l.value > 0.0)) throw ModelError("constant density must be positive");
                   lower_ = upper_ = l.value;
                 },
                 [&](const ExponentialDensity& l) {
                   if (!(l.rho_min > 0.0) || !(l.rho_max >= l.rho_min) || !(l.rate > 0.0))
                     throw ModelError("exponential density needs 0 < rho_min <= rho_max and rate > 0");
                   lower_ = l.rho_min;
                   upper_ = l.rho_max;
                   kinks_ = {0.0};
                 },
                 [&](const LogisticDensity& l) {
                   if (!(l.rho_min > 0.0) || !(l.rho_max >= l.rho_min) || !(l.rate > 0.0))
                     throw ModelError("logistic density needs 0 < rho_min <= rho_max and rate > 0");
                   lower_ = l.rho_min;
                   upper_ = l.rho_max;
                 },
                 [&](const LinearDensity& l) {
                   if (!(l.rho_min > 0.0) || !(l.rho_max > l.rho_min) || !(l.slope > 0.0))
                     throw ModelError("linear density needs 0 < rho_min < rho_max and slope > 0");
                   lower_ = l.rho_min;
                   upper_ = l.rho_max;
                   kinks_ = {(l.rho_min - l.intercept) / l.slope, (l.rho_max - l.intercept) / l.slope};
                 },
             },
             law_);
}

double Density::value(double p) const {
  return std::visit(overloaded{
                        [](const ConstantDensity& l) { return l.value; },
                        [p](const ExponentialDensity& l) {
                          return l.rho_min - (l.rho_max - l.rho_min) * std::expm1(-l.rate * std::max(p, 0.0));
                        },
                        [p](const LogisticDensity& l) {
                          return l.rho_min + (l.rho_max - l.rho_min) * logistic(l.rate * (p - l.midpoint));
                        },
                        [p](const LinearDensity& l) {
                          return std::clamp(l.intercept + l.slope * p, l.rho_min, l.rho_max);
                        },
                    },
                    law_);
}

double Density::derivative(double p) const {
  return std::visit(overloaded{
                        [](const ConstantDensity&) { return 0.0; },
                        [p](const ExponentialDensity& l) {
                          return p >= 0.0 ? (l.rho_max - l.rho_min) * l.rate * std::exp(-l.rate * p) : 0.0;
                        },
                        [p](const LogisticDensity& l) {
                          const double sig = logistic(l.rate * (p - l.midpoint));
                          return (l.rho_max - l.rho_min) * l.rate * sig * (1.0 - sig);
                        },
                        [p](const LinearDensity& l) {
                          const double v = l.intercept + l.slope * p;
                          return (v > l.rho_min && v < l.rho_max) ? l.slope : 0.0;
                        },
                    },
                    law_);
}

double Density::primitive(double p) const {
  return std::visit(
      overloaded{
          [p](const ConstantDensity& l) { return l.value * p; },
          [p](const ExponentialDensity& l) {
            if (p <= 0.0) return l.rho_min * p;
            // rho_max p - (rho_max - rho_min)(1 - e^{-c p}) / c
            return l.rho_max * p + (l.rho_max - l.rho_min) * std::expm1(-l.rate * p) / l.rate;
          },
          [p](const LogisticDensity& l) {
            const double amp = (l.rho_max - l.rho_min) / l.rate;
            return l.rho_min * p + amp * (softplus(l.rate * (p - l.midpoint)) - softplus(-l.rate * l.midpoint));
          },
          [p](const LinearDensity& l) {
            const double p1 = (l.rho_min - l.intercept) / l.slope;
            const double p2 = (l.rho_max - l.intercept) / l.slope;
            auto from_p1 = [&](double x) {
              if (x <= p1) return l.rho_min * (x - p1);
              if (x <= p2) return l.rho_min * (x - p1) + 0.5 * l.slope * (x - p1) * (x - p1);
              return l.rho_min * (p2 - p1) + 0.5 * l.slope * (p2 - p1) * (p2 - p1) + l.rho_max * (x - p2);
            };
            return from_p1(p) - from_p1(0.0);
          },
      },
      law_);
}

std::string Density::name() const {
  return std::visit(overloaded{
                        [](const ConstantDensity&) { return std::string("constant"); },
                        [](const ExponentialDensity&) { return std::string("exponential"); },
                        [](const LogisticDensity&) { return std::string("logistic"); },
                        [](const LinearDensity&) { return std::string("linear"); },
                    },
                    law_);
}

// ---------------------------------------------------------------------------
// Mobility

Mobility::Mobility(MobilityLaw law) : law_(std::move(law)) {
  if (const auto* pw = std::get_if<PowerMobility>(&law_)) {
    if (!(pw->scale > 0.0) || !(pw->exponent >= 1.0))
      throw ModelError("power mobility needs scale > 0 and exponent >= 1");
  } else if (std::get<PolynomialMobility>(law_).coefficients.empty()) {
    throw ModelError("polynomial mobility needs at least one coefficient");
  }
}

double Mobility::value(double s) const {
  const double x = std::clamp(s, 0.0, 1.0);
  return std::visit(overloaded{
                        [x](const PowerMobility& l) { return l.scale * std::pow(l.decreasing ? 1.0 - x : x, l.exponent); },
                        [x](const PolynomialMobility& l) { return polyval(l.coefficients, x); },
                    },
                    law_);
}

double Mobility::derivative(double s) const {
  if (s < 0.0 || s > 1.0) return 0.0;
  return std::visit(overloaded{
                        [s](const PowerMobility& l) {
                          const double x = l.decreasing ? 1.0 - s : s;
                          const double d = l.exponent == 1.0 ? l.scale : l.scale * l.exponent * std::pow(x, l.exponent - 1.0);
                          return l.decreasing ? -d : d;
                        },
                        [s](const PolynomialMobility& l) { return polyder(l.coefficients, s); },
                    },
                    law_);
}

std::string Mobility::name() const {
  return std::holds_alternative<PowerMobility>(law_) ? "power" : "polynomial";
}

// ---------------------------------------------------------------------------
// MonotoneSplit

MonotoneSplit::MonotoneSplit(const Mobility& mobility, double sign) : mobility_(mobility), sign_(sign) {
  constexpr int kSamples = 4096;
  breaks_.push_back(0.0);
  auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
  double prev_x = 0.0;
  double prev_d = fprime(0.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = static_cast<double>(i) / kSamples;
    const double d = fprime(x);
    if (sgn(d) * sgn(prev_d) < 0) {
      double a = prev_x, b = x;
      for (int it = 0; it < 80 && b - a > 1e-16; ++it) {
        const double m = 0.5 * (a + b);
        (sgn(fprime(m)) == sgn(prev_d) ? a : b) = m;
      }
      breaks_.push_back(0.5 * (a + b));
    }
    if (sgn(d) != 0) {
      prev_d = d;
      prev_x = x;
    }
  }
  breaks_.push_back(1.0);

  double up_acc = 0.0, down_acc = 0.0;
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    Segment seg{breaks_[i], breaks_[i + 1], true, up_acc, down_acc};
    const double rise = f(seg.hi) - f(seg.lo);
    seg.increasing = fprime(0.5 * (seg.lo + seg.hi)) >= 0.0;
    (seg.increasing ? up_acc : down_acc) += rise;
    segments_.push_back(seg);
  }
}

const MonotoneSplit::Segment& MonotoneSplit::locate(double z) const {
  auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, z);
  return segments_[static_cast<std::size_t>(it - breaks_.begin() - 1)];
}

double MonotoneSplit::up(double z) const { return evaluate(z, true); }
double MonotoneSplit::down(double z) const { return evaluate(z, false); }

bool MonotoneSplit::nondecreasing() const {
  return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.increasing; });
}

bool MonotoneSplit::nonincreasing() const {
  for (const Segment& s : segments_)
    if (f(s.hi) - f(s.lo) > 0.0) return false;
  return true;
}

std::pair<MonotoneSplit, MonotoneSplit> mobility_split(const Mobility& mobility) {
  return {MonotoneSplit(mobility, 1.0), MonotoneSplit(mobility, -1.0)};
}

// ---------------------------------------------------------------------------
// Capillary

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  struct Rec {
    const std::function<double(double)>& f;
    double run(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double diff = left + right - whole;
      if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
      return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec{f}.run(a, b, fa, fm, fb, whole, tol, 50);
}

namespace {
constexpr int kTableIntervals = 512;
}

Capillary::Capillary(CapillaryLaw law, double offset) : law_(std::move(law)), offset_(offset) {
  if (!(offset_ >= 0.0)) throw ModelError("capillary offset must be nonnegative");
  std::visit(overloaded{
                 [](const PolynomialCapillary& l) {
                   if (l.coefficients.empty()) throw ModelError("polynomial capillarity needs coefficients");
                 },
                 [](const PowerCapillary& l) {
                   if (!(l.exponent >= 0.0)) throw ModelError("power capillarity needs exponent >= 0");
                 },
                 [](const SaturatingCapillary& l) {
                   if (!(l.rate > 0.0)) throw ModelError("saturating capillarity needs rate > 0");
                 },
             },
             law_);

  if (tabulated()) {
    beta_table_.assign(kTableIntervals + 1, 0.0);
    q_table_.assign(kTableIntervals + 1, 0.0);
    const auto a = [this](double s) { return alpha01(s); };
    const auto ra = [this](double s) { return s * alpha01(s); };
    for (int i = 1; i <= kTableIntervals; ++i) {
      const double lo = static_cast<double>(i - 1) / kTableIntervals;
      const double hi = static_cast<double>(i) / kTableIntervals;
      beta_table_[i] = beta_table_[i - 1] + adaptive_simpson(a, lo, hi, 1e-15);
      q_table_[i] = q_table_[i - 1] + adaptive_simpson(ra, lo, hi, 1e-15);
    }
  }
  alpha_one_ = alpha01(1.0) + offset_;
  beta_one_ = beta01(1.0) + offset_;
  B_one_ = beta01(1.0) - q01(1.0) + 0.5 * offset_;
}

double Capillary::alpha01(double s) const {
  return std::visit(overloaded{
                        [s](const PolynomialCapillary& l) { return polyval(l.coefficients, s); },
                        [s](const PowerCapillary& l) { return l.exponent == 0.0 ? l.scale : l.scale * std::pow(s, l.exponent); },
                        [s](const SaturatingCapillary& l) { return -l.scale * std::expm1(-l.rate * s); },
                    },
                    law_);
}

double Capillary::beta01(double s) const {
  return std::visit(overloaded{
                        [s](const PolynomialCapillary& l) {
                          double acc = 0.0;
                          for (std::size_t i = l.coefficients.size(); i-- > 0;)
                            acc = acc * s + l.coefficients[i] / static_cast<double>(i + 1);
                          return acc * s;
                        },
                        [s](const PowerCapillary& l) { return l.scale * std::pow(s, l.exponent + 1.0) / (l.exponent + 1.0); },
                        [this, s](const SaturatingCapillary&) {
                          const int i = std::min(static_cast<int>(s * kTableIntervals), kTableIntervals);
                          const double node = static_cast<double>(i) / kTableIntervals;
                          return beta_table_[static_cast<std::size_t>(i)] +
                                 adaptive_simpson([this](double r) { return alpha01(r); }, node, s);
                        },
                    },
                    law_);
}

double Capillary::q01(double s) const {
  return std::visit(overloaded{
                        [s](const PolynomialCapillary& l) {
                          double acc = 0.0;
                          for (std::size_t i = l.coefficients.size(); i-- > 0;)
                            acc = acc * s + l.coefficients[i] / static_cast<double>(i + 2);
                          return acc * s * s;
                        },
                        [s](const PowerCapillary& l) { return l.scale * std::pow(s, l.exponent + 2.0) / (l.exponent + 2.0); },
                        [this, s](const SaturatingCapillary&) {
                          const int i = std::min(static_cast<int>(s * kTableIntervals), kTableIntervals);
                          const double node = static_cast<double>(i) / kTableIntervals;
                          return q_table_[static_cast<std::size_t>(i)] +
                                 adaptive_simpson([this](double r) { return r * alpha01(r); }, node, s);
                        },
                    },
                    law_);
}

double Capillary::alpha(double s) const {
  if (s < 0.0) return 0.0;
  if (s > 1.0) return alpha_one_;
  return alpha01(s) + offset_;
}

double Capillary::beta(double s) const {
  if (s <= 0.0) return 0.0;
  if (s > 1.0) return beta_one_ + alpha_one_ * (s - 1.0);
  return beta01(s) + offset_ * s;
}

double Capillary::big_B(double s) const {
  if (s <= 0.0) return 0.0;
  if (s > 1.0) {
    const double t = s - 1.0;
    return B_one_ + beta_one_ * t + 0.5 * alpha_one_ * t * t;
  }
  // B(s) = s beta(s) - int_0^s r alpha(r) dr, integrating by parts.
  return s * beta01(s) - q01(s) + 0.5 * offset_ * s * s;
}

double Capillary::beta_inverse(double v) const {
  if (!(v >= 0.0) || v > beta_one_) throw ModelError(fmt::format("beta_inverse: {} is outside [0, {}]", v, beta_one_));
  double lo = 0.0, hi = 1.0;
  if (tabulated()) {
    // Bracket on the monotone table first.
    std::vector<double> nodes(beta_table_.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      nodes[i] = beta_table_[i] + offset_ * static_cast<double>(i) / kTableIntervals;
    auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
    const auto idx = static_cast<int>(it - nodes.begin());
    hi = static_cast<double>(std::min(idx, kTableIntervals)) / kTableIntervals;
    lo = static_cast<double>(std::max(idx - 1, 0)) / kTableIntervals;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (beta(mid) < v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string Capillary::name() const {
  return std::visit(overloaded{
                        [](const PolynomialCapillary&) { return std::string("polynomial"); },
                        [](const PowerCapillary&) { return std::string("power"); },
                        [](const SaturatingCapillary&) { return std::string("saturating"); },
                    },
                    law_);
}

// ---------------------------------------------------------------------------
// DerivedFunctions

DerivedFunctions::DerivedFunctions(const FluidModel& model)
    : density_(model.density),
      gas_mobility_(model.gas_mobility),
      water_mobility_(model.water_mobility),
      capillary_(model.capillary),
      water_density_(model.water_density),
      m0_(model.total_mobility_floor),
      gas_split_(model.gas_mobility, -1.0),
      water_split_(model.water_mobility, 1.0) {
  if (!(water_density_ > 0.0)) throw ModelError("water density must be positive");
  if (!(m0_ > 0.0)) throw ModelError("total mobility floor m0 must be positive");
}

double beta(const DerivedFunctions& fn, double s) { return fn.beta(s); }
double beta_inverse(const DerivedFunctions& fn, double v) { return fn.beta_inverse(v); }
double big_B(const DerivedFunctions& fn, double s) { return fn.big_B(s); }
double g_aux(const DerivedFunctions& fn, double p) { return fn.g_aux(p); }
double big_H(const DerivedFunctions& fn, double p) { return fn.big_H(p); }
double interface_density(const DerivedFunctions& fn, double pK, double pL) { return fn.interface_density(pK, pL); }

// ---------------------------------------------------------------------------
// Hypotheses

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.pass; });
}

const HypothesisCheck& HypothesisReport::at(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw std::out_of_range("no hypothesis check named " + id);
}

double estimate_holder_exponent(const Capillary& capillary) {
  const double top = capillary.beta(1.0);
  if (!(top > 0.0)) return 0.0;
  double theta = 1.0;
  double v = top;
  double prev = capillary.beta_inverse(v);
  for (int k = 1; k <= 30; ++k) {
    v *= 0.5;
    const double cur = capillary.beta_inverse(v);
    if (cur <= 1e-12 || prev <= 1e-12) break;
    theta = std::min(theta, std::log2(prev / cur));
    prev = cur;
  }
  return std::clamp(theta, 0.0, 1.0);
}

namespace {

void note(HypothesisCheck& check, double violation, double where) {
  if (violation > check.worst_violation) {
    check.worst_violation = violation;
    check.location = where;
  }
}

}  // namespace

HypothesisReport validate_hypotheses(const FluidModel& model, std::pair<double, double> pressure_range,
                                     int n_samples) {
  if (n_samples < 2) throw ModelError("validate_hypotheses needs at least 2 samples");
  HypothesisReport report;
  const double denom = static_cast<double>(n_samples - 1);

  {
    HypothesisCheck h{"H1", "porosity bounded away from 0", true, 0.0, 0.0, {}};
    for (Index k = 0; k < model.porosity.size(); ++k) {
      const double phi = model.porosity[k];
      require_finite(phi, "porosity", static_cast<double>(k));
      if (!(phi > 0.0)) {
        h.pass = false;
        note(h, -phi, static_cast<double>(k));
      }
    }
    report.checks.push_back(h);
  }
  {
    HypothesisCheck h{"K", "permeability k >= k0 > 0", true, 0.0, 0.0, {}};
    for (Index k = 0; k < model.permeability.size(); ++k) {
      const double kv = model.permeability[k];
      require_finite(kv, "permeability", static_cast<double>(k));
      if (!(kv > 0.0)) {
        h.pass = false;
        note(h, -kv, static_cast<double>(k));
      }
    }
    report.checks.push_back(h);
  }
  {
    HypothesisCheck h{"H3", "M1(0)=0, M2(1)=0, M1+M2 >= m0", true, 0.0, 0.0, {}};
    const double m0 = model.total_mobility_floor;
    const double m10 = model.gas_mobility.value(0.0);
    const double m21 = model.water_mobility.value(1.0);
    require_finite(m10, "gas mobility", 0.0);
    require_finite(m21, "water mobility", 1.0);
    if (m10 != 0.0) note(h, std::abs(m10), 0.0), h.pass = false;
    if (m21 != 0.0) note(h, std::abs(m21), 1.0), h.pass = false;
    for (int i = 0; i < n_samples; ++i) {
      const double s = static_cast<double>(i) / denom;
      const double m1 = model.gas_mobility.value(s);
      const double m2 = model.water_mobility.value(s);
      require_finite(m1, "gas mobility", s);
      require_finite(m2, "water mobility", s);
      if (m1 < 0.0 || m2 < 0.0) note(h, -std::min(m1, m2), s), h.pass = false;
      if (m1 + m2 < m0 - 1e-12) note(h, m0 - (m1 + m2), s), h.pass = false;
    }
    report.checks.push_back(h);
  }
  {
    HypothesisCheck h{"H4", "alpha(0)=0, alpha>0 on (0,1]; beta^-1 Hoelder", true, 0.0, 0.0, {}};
    const double a0 = model.capillary.alpha(0.0);
    require_finite(a0, "alpha", 0.0);
    if (a0 != 0.0) note(h, std::abs(a0), 0.0), h.pass = false;
    for (int i = 1; i < n_samples; ++i) {
      const double s = static_cast<double>(i) / denom;
      const double a = model.capillary.alpha(s);
      require_finite(a, "alpha", s);
      if (s > 1e-6 && !(a > 0.0)) note(h, -a + std::numeric_limits<double>::min(), s), h.pass = false;
    }
    if (h.pass) h.estimate = estimate_holder_exponent(model.capillary);
    report.checks.push_back(h);
  }
  {
    HypothesisCheck h{"H6", "rho in [rho_m, rho_M], nondecreasing, rho_m > 0", true, 0.0, 0.0, {}};
    const auto& rho = model.density;
    if (!(rho.lower_bound() > 0.0)) note(h, -rho.lower_bound(), 0.0), h.pass = false;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      const double p = pressure_range.first + (pressure_range.second - pressure_range.first) * i / denom;
      const double r = rho.value(p);
      require_finite(r, "density", p);
      if (r < rho.lower_bound()) note(h, rho.lower_bound() - r, p), h.pass = false;
      if (r > rho.upper_bound()) note(h, r - rho.upper_bound(), p), h.pass = false;
      if (r < prev) note(h, prev - r, p), h.pass = false;
      prev = r;
    }
    report.checks.push_back(h);
  }
  return report;
}

}  // namespace fvgw
