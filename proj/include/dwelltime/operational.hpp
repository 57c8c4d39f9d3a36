#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dwelltime/dwell.hpp"
#include "dwelltime/errors.hpp"
#include "dwelltime/potential.hpp"
#include "dwelltime/quantities.hpp"
#include "dwelltime/richardson.hpp"
#include "dwelltime/scattering.hpp"

namespace dwelltime {

// Printed decay constant of the 852 nm Cs transition used as the shipped default.
// The measured D2 linewidth is about 3.3e7 1/s; both are accepted as input.
inline constexpr double kDefaultGamma = 33.3e-6;     // 1/s
inline constexpr double kCesiumD2Wavelength = 852e-9;  // m

// Two-level atom driven off resonance.
struct LaserParams {
  double gamma = kDefaultGamma;  // decay constant, 1/s
  double omega = 0.0;            // Rabi frequency, 1/s
  double delta = 0.0;            // laser minus transition frequency, 1/s
  double wavelength = kCesiumD2Wavelength;

  // Settings given in units of gamma.
  static LaserParams in_gamma_units(double delta_over_gamma, double omega_over_gamma,
                                    double gamma = kDefaultGamma,
                                    double wavelength = kCesiumD2Wavelength) {
    return {gamma, omega_over_gamma * gamma, delta_over_gamma * gamma, wavelength};
  }

  // |Delta| > 10 max(gamma, Omega); reported, not enforced.
  bool large_detuning() const { return std::abs(delta) > 10.0 * std::max(gamma, omega); }
};

inline void validate(const LaserParams& laser) {
  if (!(laser.gamma > 0.0)) throw DomainError("laser gamma must be positive");
  if (!(laser.omega > 0.0)) throw DomainError("Rabi frequency must be positive");
  if (laser.delta == 0.0 || !std::isfinite(laser.delta))
    throw DomainError("detuning must be nonzero");
}

// V = v_real - i v_imag on the illuminated strip.
struct EffectivePotential {
  double v_real;
  double v_imag;
};

inline EffectivePotential effective_potential(const LaserParams& laser,
                                              const PhysicalConstants& c = kSI) {
  validate(laser);
  const double omega2 = laser.omega * laser.omega;
  return {c.hbar * omega2 / (4.0 * laser.delta),
          c.hbar * laser.gamma * omega2 / (8.0 * laser.delta * laser.delta)};
}

// Mean time to the first fluorescence photon, 4 Delta^2 / (Omega^2 gamma).
inline double detection_delay(const LaserParams& laser) {
  validate(laser);
  return 4.0 * laser.delta * laser.delta / (laser.omega * laser.omega * laser.gamma);
}

inline double tau_approx(double absorption, double v_imag, const PhysicalConstants& c = kSI) {
  if (!(v_imag > 0.0)) throw DomainError("v_imag must be positive");
  if (!(absorption >= 0.0 && absorption <= 1.0))
    throw DomainError("absorption must lie in [0, 1]");
  return c.hbar * absorption / (2.0 * v_imag);
}

// Which incidence(s) the absorption signal is taken from. `average` uses
// (A_left + A_right)/2, whose derivative limit is trace(M)/2 for any real
// potential; the single-sided signals give the diagonal elements M11, M22.
enum class AbsorptionSignal { left, right, average };

struct DerivativeLimit {
  double value = 0.0;
  double error_estimate = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v_imag_ladder;
  std::vector<double> absorption;
};

inline constexpr double kDerivativeTolerance = 1e-3;

namespace detail {

inline double absorption_signal(const PiecewisePotential& pot_real, double momentum, double mass,
                                double v_imag, AbsorptionSignal signal,
                                const PhysicalConstants& c) {
  const ScatteringSolution sol =
      solve_scattering(pot_real.with_absorption(v_imag), momentum, mass, c);
  switch (signal) {
    case AbsorptionSignal::left:
      return sol.absorption_left;
    case AbsorptionSignal::right:
      return sol.absorption_right;
    case AbsorptionSignal::average:
      break;
  }
  return 0.5 * (sol.absorption_left + sol.absorption_right);
}

}  // namespace detail

// Geometric ladder (ratio 1/2, `terms` entries) starting where the absorption
// signal lies in [0.05, 0.2).
inline std::vector<double> default_v_imag_ladder(const PiecewisePotential& pot_real,
                                                 double momentum, double mass,
                                                 AbsorptionSignal signal = AbsorptionSignal::average,
                                                 const PhysicalConstants& c = kSI,
                                                 std::size_t terms = 8) {
  const double classical = mass * pot_real.region().length() / momentum;
  double v = 0.1 * c.hbar / (2.0 * classical);
  for (int iter = 0; iter < 40; ++iter) {
    const double a = detail::absorption_signal(pot_real, momentum, mass, v, signal, c);
    if (a >= 0.05 && a < 0.2) break;
    if (a >= 0.2) {
      v *= 0.5;
    } else {
      v *= a > 0.0 ? std::min(100.0, 0.1 / a) : 100.0;
    }
  }
  std::vector<double> ladder(terms);
  for (std::size_t k = 0; k < terms; ++k) ladder[k] = std::ldexp(v, -static_cast<int>(k));
  return ladder;
}

// lim_{V_I -> 0} (hbar/2) dA/dV_I, estimated by extrapolating
// (hbar/2) A(V_I)/V_I over a decreasing ladder of V_I values (A(0) = 0 for a
// real potential). With a single rung this is a plain one-sided difference.
inline DerivativeLimit dwell_via_absorption_derivative(
    const PiecewisePotential& pot_real, double momentum, double mass,
    std::span<const double> v_imag_ladder = {},
    AbsorptionSignal signal = AbsorptionSignal::average, const PhysicalConstants& c = kSI) {
  if (!pot_real.is_real()) throw DomainError("derivative limit needs a real base potential");
  if (!(momentum > 0.0)) throw DomainError("momentum must be positive");
  DerivativeLimit out;
  if (v_imag_ladder.empty()) {
    out.v_imag_ladder = default_v_imag_ladder(pot_real, momentum, mass, signal, c);
  } else {
    out.v_imag_ladder.assign(v_imag_ladder.begin(), v_imag_ladder.end());
  }
  const auto& ladder = out.v_imag_ladder;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (!(ladder[k] > 0.0)) throw DomainError("V_I ladder entries must be positive");
    if (k > 0 && !(ladder[k] < ladder[k - 1]))
      throw DomainError("V_I ladder must be strictly decreasing");
  }

  std::vector<double> quotient;
  quotient.reserve(ladder.size());
  for (double v : ladder) {
    const double a = detail::absorption_signal(pot_real, momentum, mass, v, signal, c);
    out.absorption.push_back(a);
    quotient.push_back(0.5 * c.hbar * a / v);
  }
  const Extrapolation ex =
      extrapolate_to_zero<double>(std::span<const double>(ladder), std::span<const double>(quotient));
  out.value = ex.value;
  out.error_estimate = ex.error_estimate;
  if (ladder.size() > 1 && !(ex.error_estimate <= kDerivativeTolerance * std::abs(ex.value)))
    throw AccuracyError("absorption-derivative extrapolation did not converge");
  return out;
}

// How the laser's light shift relates to the physical barrier on the strip.
enum class LightShiftConvention {
  // The barrier is the light shift: the strip keeps the physical barrier as its
  // real part and the laser only adds -i V_I.
  barrier_is_lightshift,
  // The light shift V_R is added on top of the physical barrier.
  barrier_plus_lightshift,
};

struct EstimatorReport {
  double exact_dwell = 0.0;
  double tau_approx = 0.0;
  double absorption = 0.0;
  double relative_error = 0.0;
  double delay = 0.0;
  double dwell_over_delay = 0.0;
  double v_imag = 0.0;
};

inline constexpr double kFluxConsistencyTolerance = 1e-10;

// Real potential the exact dwell is evaluated on under a given convention.
inline PiecewisePotential exact_potential(const PiecewisePotential& pot_real,
                                          const LaserParams& laser,
                                          LightShiftConvention convention,
                                          const PhysicalConstants& c = kSI) {
  if (convention == LightShiftConvention::barrier_is_lightshift) return pot_real;
  return pot_real.shifted_on_region(complex(effective_potential(laser, c).v_real, 0.0));
}

inline EstimatorReport estimator_report(
    const PiecewisePotential& pot_real, double momentum, double mass, const LaserParams& laser,
    LightShiftConvention convention = LightShiftConvention::barrier_is_lightshift,
    const PhysicalConstants& c = kSI) {
  if (!pot_real.is_real()) throw DomainError("estimator needs a real base potential");
  const EffectivePotential eff = effective_potential(laser, c);
  const PiecewisePotential real_part = exact_potential(pot_real, laser, convention, c);
  const PiecewisePotential absorbing = real_part.with_absorption(eff.v_imag);

  EstimatorReport report;
  report.v_imag = eff.v_imag;
  report.exact_dwell =
      at_regular_momentum(momentum, [&](double p) { return dwell_matrix(real_part, p, mass, c); })
          .average;

  // Flux-balance absorption keeps full relative precision at tiny A; it must
  // agree with the unitarity defect of the amplitudes.
  const ScatteringSolution sol = solve_scattering(absorbing, momentum, mass, c);
  report.absorption = absorbed_fraction(absorbing, momentum, Incidence::left, mass, c);
  if (std::abs(report.absorption - sol.absorption_left) > kFluxConsistencyTolerance)
    throw UnitarityViolation("absorbed flux disagrees with 1 - |t|^2 - |r|^2");

  report.tau_approx = tau_approx(std::clamp(report.absorption, 0.0, 1.0), eff.v_imag, c);
  report.relative_error = (report.exact_dwell - report.tau_approx) / report.exact_dwell;
  report.delay = detection_delay(laser);
  report.dwell_over_delay = report.exact_dwell / report.delay;
  return report;
}

struct SinglePhotonCheck {
  bool in_regime;
  double dwell_over_delay;
};

inline SinglePhotonCheck single_photon_regime(double exact_dwell, const LaserParams& laser,
                                              double threshold = 0.1) {
  const double ratio = exact_dwell / detection_delay(laser);
  return {ratio < threshold, ratio};
}

struct FeasibilityThresholds {
  double mode_separation = 1.0;  // c1 must exceed this
  double rabi_energy = 10.0;     // c2 must exceed this
};

struct FeasibilityReport {
  double mode_ratio;    // c1 = (hbar/E) / (2/gamma + gamma/Omega^2)
  double energy_ratio;  // c2 = E / (hbar Omega)
  bool modes_resolved;
  bool reflection_avoided;
  bool feasible;
};

// Whether fluorescence counting could resolve the two dwell modes: the mode
// spacing hbar/E must exceed the photon emission interval while E >> hbar
// Omega. Since 2/gamma + gamma/Omega^2 >= 2 sqrt(2)/Omega, c1 > 1 forces
// c2 < 1/(2 sqrt 2), so the two never hold together.
inline FeasibilityReport fluorescence_feasibility(double energy, const LaserParams& laser,
                                                  FeasibilityThresholds thresholds = {},
                                                  const PhysicalConstants& c = kSI) {
  if (!(energy > 0.0)) throw DomainError("energy must be positive");
  if (!(laser.gamma > 0.0) || !(laser.omega > 0.0))
    throw DomainError("gamma and Omega must be positive");
  FeasibilityReport r;
  const double emission_interval = 2.0 / laser.gamma + laser.gamma / (laser.omega * laser.omega);
  r.mode_ratio = (c.hbar / energy) / emission_interval;
  r.energy_ratio = energy / (c.hbar * laser.omega);
  r.modes_resolved = r.mode_ratio > thresholds.mode_separation;
  r.reflection_avoided = r.energy_ratio > thresholds.rabi_energy;
  r.feasible = r.modes_resolved && r.reflection_avoided;
  return r;
}

struct FeasibilityScan {
  std::size_t points = 0;
  std::size_t feasible = 0;
  std::size_t modes_resolved = 0;
  std::size_t reflection_avoided = 0;
};

// Log grid over gamma, Omega (1/s) and E/hbar (1/s): `per_axis` points from
// `lo` to `lo * 10^decades` on each axis.
inline FeasibilityScan fluorescence_feasibility_scan(double lo = 1e4, double decades = 6.0,
                                                     std::size_t per_axis = 25,
                                                     FeasibilityThresholds thresholds = {},
                                                     const PhysicalConstants& c = kSI) {
  FeasibilityScan scan;
  auto axis = [&](std::size_t i) {
    return lo * std::pow(10.0, decades * static_cast<double>(i) /
                                   static_cast<double>(per_axis - 1));
  };
  for (std::size_t ig = 0; ig < per_axis; ++ig) {
    for (std::size_t io = 0; io < per_axis; ++io) {
      LaserParams laser{axis(ig), axis(io), 1.0, kCesiumD2Wavelength};
      for (std::size_t ie = 0; ie < per_axis; ++ie) {
        const FeasibilityReport r = fluorescence_feasibility(c.hbar * axis(ie), laser, thresholds, c);
        ++scan.points;
        scan.feasible += r.feasible;
        scan.modes_resolved += r.modes_resolved;
        scan.reflection_avoided += r.reflection_avoided;
      }
    }
  }
  return scan;
}

}  // namespace dwelltime
