#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dwelltime/errors.hpp"
#include "dwelltime/potential.hpp"
#include "dwelltime/quantities.hpp"
#include "dwelltime/scattering.hpp"

namespace dwelltime {

// Eigenvalues of the on-shell dwell operator from a closed-form expression.
// `t_plus >= t_minus` always; `signed_plus`/`signed_minus` keep the labels of
// the formula (the sign in front of the sine term), which swap where sin < 0.
struct DwellPair {
  double t_plus;
  double t_minus;
  double signed_plus;
  double signed_minus;
};

using HermitianMatrix2 = std::array<std::array<complex, 2>, 2>;

// On-shell dwell matrix in the {left-incidence, right-incidence} basis.
struct DwellSpectrum {
  double momentum = 0.0;
  double t_plus = 0.0;
  double t_minus = 0.0;
  double average = 0.0;
  HermitianMatrix2 matrix{};
};

namespace detail {

// Even entire functions of w = z^2, continued to w < 0 through sinh/cosh.
inline double sinc_even(double w) {
  if (std::abs(w) < 0.1)
    return 1.0 + w * (-1.0 / 6 + w * (1.0 / 120 + w * (-1.0 / 5040 + w * (1.0 / 362880 +
                                                                          w * (-1.0 / 39916800)))));
  if (w > 0.0) {
    const double z = std::sqrt(w);
    return std::sin(z) / z;
  }
  const double z = std::sqrt(-w);
  return std::sinh(z) / z;
}

inline double cos_even(double w) {
  if (w >= 0.0) return std::cos(std::sqrt(w));
  return std::cosh(std::sqrt(-w));
}

// (1 - sinc)/w
inline double one_minus_sinc_over(double w) {
  if (std::abs(w) < 0.1)
    return 1.0 / 6 +
           w * (-1.0 / 120 +
                w * (1.0 / 5040 + w * (-1.0 / 362880 + w * (1.0 / 39916800 +
                                                            w * (-1.0 / 6227020800.0)))));
  return (1.0 - sinc_even(w)) / w;
}

// (1 - cos)/w
inline double one_minus_cos_over(double w) {
  if (std::abs(w) < 0.1)
    return 0.5 + w * (-1.0 / 24 +
                      w * (1.0 / 720 + w * (-1.0 / 40320 + w * (1.0 / 3628800 +
                                                                w * (-1.0 / 479001600.0)))));
  return (1.0 - cos_even(w)) / w;
}

// Beyond this z the cosh-scaled form is used: u * cosh(z) overflows well before
// cosh(z) itself does when the barrier is high.
inline constexpr double kCoshScaleLimit = 30.0;

inline DwellPair sorted_pair(double signed_plus, double signed_minus, double momentum) {
  if (!std::isfinite(signed_plus) || !std::isfinite(signed_minus))
    throw PoleError("dwell eigenvalue denominator vanishes", momentum);
  return {std::max(signed_plus, signed_minus), std::min(signed_plus, signed_minus), signed_plus,
          signed_minus};
}

}  // namespace detail

// Square barrier (or well, V0 < 0) of height V0 filling the region of length l.
// Below threshold (q^2 < 0) the formula is continued through sinh/cosh, and the
// minus branch is written with the q^2 factor cancelled so it stays finite at
// q = 0.
inline DwellPair barrier_dwell_eigenvalues(double momentum, double length, double v0,
                                           double mass, const PhysicalConstants& c = kSI) {
  if (!(momentum > 0.0)) throw DomainError("momentum must be positive");
  if (!(length > 0.0)) throw DomainError("region length must be positive");
  if (!(mass > 0.0)) throw DomainError("mass must be positive");
  if (!std::isfinite(v0)) throw DomainError("barrier height must be finite");

  const double p2 = momentum * momentum;
  const double u = 2.0 * mass * v0;
  const double q2 = p2 - u;
  const double l2 = (length / c.hbar) * (length / c.hbar);
  const double w = q2 * l2;
  const double prefactor = 2.0 * mass * length * momentum;

  double num_plus, den_plus, num_minus, den_minus;
  if (w < 0.0 && std::sqrt(-w) > detail::kCoshScaleLimit) {
    // Numerator and denominator divided by cosh(z).
    const double z = std::sqrt(-w);
    const double inv_cosh = 2.0 * std::exp(-z) / (1.0 + std::exp(-2.0 * z));
    const double tanh_over = std::tanh(z) / z;
    num_plus = inv_cosh + tanh_over;
    den_plus = (p2 + q2) * inv_cosh + u;
    num_minus = l2 * (tanh_over - inv_cosh) / (z * z);
    den_minus = 2.0 * inv_cosh + u * l2 * (1.0 - inv_cosh) / (z * z);
  } else {
    num_plus = 1.0 + detail::sinc_even(w);
    den_plus = p2 + q2 + u * detail::cos_even(w);
    num_minus = l2 * detail::one_minus_sinc_over(w);
    den_minus = 2.0 + u * l2 * detail::one_minus_cos_over(w);
  }
  if (den_plus == 0.0 || den_minus == 0.0)
    throw PoleError("dwell eigenvalue denominator vanishes", momentum);
  return detail::sorted_pair(prefactor * num_plus / den_plus,
                             prefactor * num_minus / den_minus, momentum);
}

inline DwellPair free_dwell_eigenvalues(double momentum, double length, double mass,
                                        const PhysicalConstants& c = kSI) {
  if (momentum == 0.0)
    throw DomainError("free dwell eigenvalue t_plus diverges at zero momentum");
  if (!(momentum > 0.0)) throw DomainError("momentum must be positive");
  if (!(length > 0.0)) throw DomainError("region length must be positive");
  const double base = mass * length / momentum;
  const double z = momentum * length / c.hbar;
  const double w = z * z;
  const double plus = base * (1.0 + detail::sinc_even(w));
  const double minus = base * w * detail::one_minus_sinc_over(w);
  return detail::sorted_pair(plus, minus, momentum);
}

inline double average_dwell(const DwellSpectrum& spectrum) {
  return 0.5 * (spectrum.t_plus + spectrum.t_minus);
}

inline double average_dwell(const DwellPair& pair) { return 0.5 * (pair.t_plus + pair.t_minus); }

// (t+ - t-)/(t+ + t-): 0 at a degeneracy, 1 in the fully bimodal limit.
inline double splitting_ratio(double t_plus, double t_minus) {
  return (t_plus - t_minus) / (t_plus + t_minus);
}

inline constexpr double kHermiticityTolerance = 1e-10;

// M_ab = (m/p) * integral over D of conj(psi_a) psi_b for the unit-amplitude
// left/right-incidence states. Real potentials only.
inline DwellSpectrum dwell_matrix(const PiecewisePotential& pot, double momentum, double mass,
                                  const PhysicalConstants& c = kSI) {
  if (!pot.is_real())
    throw DomainError("the on-shell dwell matrix is defined for real potentials only");
  const WaveField left = wavefunction(pot, momentum, Incidence::left, mass, c);
  const WaveField right = wavefunction(pot, momentum, Incidence::right, mass, c);
  const double lo = pot.region().left_edge;
  const double hi = pot.region().right_edge;
  const double scale = mass / momentum;

  DwellSpectrum spec;
  spec.momentum = momentum;
  const complex m11 = scale * weighted_overlap(left, left, lo, hi);
  const complex m22 = scale * weighted_overlap(right, right, lo, hi);
  const complex m12 = scale * weighted_overlap(left, right, lo, hi);
  const complex m21 = scale * weighted_overlap(right, left, lo, hi);

  const double trace = m11.real() + m22.real();
  const double tol = kHermiticityTolerance * trace;
  if (!(trace > 0.0) || std::abs(m12 - std::conj(m21)) > tol || std::abs(m11.imag()) > tol ||
      std::abs(m22.imag()) > tol)
    throw AccuracyError("dwell matrix failed the Hermiticity check");

  const complex off = 0.5 * (m12 + std::conj(m21));
  spec.matrix = {{{m11.real(), off}, {std::conj(off), m22.real()}}};
  const double mean = 0.5 * trace;
  const double radius = std::hypot(0.5 * (m11.real() - m22.real()), std::abs(off));
  spec.t_plus = mean + radius;
  spec.t_minus = mean - radius;
  spec.average = average_dwell(spec);
  return spec;
}

// c^dagger M c for a normalized superposition of the two on-shell states.
// On-shell time evolution multiplies c by a global phase, which drops out.
inline double on_shell_expectation(const DwellSpectrum& spectrum,
                                   const std::array<complex, 2>& coefficients) {
  const double norm = std::norm(coefficients[0]) + std::norm(coefficients[1]);
  if (std::abs(norm - 1.0) > 1e-12) throw DomainError("coefficients must be normalized");
  complex sum;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      sum += std::conj(coefficients[a]) * spectrum.matrix[a][b] * coefficients[b];
  return sum.real();
}

// Classical time spent in D by a particle of energy E incident from the left.
// A particle meeting a segment with V >= E turns back there and spends twice
// the time accumulated before it. Infinite at a classical turning threshold.
inline double classical_dwell(const PiecewisePotential& pot, double energy, double mass) {
  if (!pot.is_real()) throw DomainError("classical dwell requires a real potential");
  if (!(energy > 0.0)) throw DomainError("energy must be positive");
  const RegionSpec& d = pot.region();
  auto time_over = [&](double lo, double hi, double v) {
    const double span = std::max(0.0, std::min(hi, d.right_edge) - std::max(lo, d.left_edge));
    if (span == 0.0) return 0.0;
    if (v == energy) return std::numeric_limits<double>::infinity();
    return span / std::sqrt(2.0 * (energy - v) / mass);
  };
  const auto bp = pot.breakpoints();
  const auto vals = pot.values();
  if (vals.empty()) return time_over(d.left_edge, d.right_edge, 0.0);

  double elapsed = time_over(d.left_edge, bp.front(), 0.0);
  for (std::size_t j = 0; j < vals.size(); ++j) {
    if (vals[j].real() > energy) return 2.0 * elapsed;
    elapsed += time_over(bp[j], bp[j + 1], vals[j].real());
  }
  return elapsed + time_over(bp.back(), d.right_edge, 0.0);
}

// Evaluates `f` at `momentum`, nudging it by one part in 1e9 if it lands on a
// degenerate wavenumber.
template <class F>
auto at_regular_momentum(double momentum, F&& f) -> decltype(f(momentum)) {
  try {
    return f(momentum);
  } catch (const DegenerateWavenumberError&) {
    return f(momentum * (1.0 + 1e-9));
  }
}

struct BoundScan {
  double sup_t_plus = 0.0;
  double argmax_momentum = 0.0;
  // The maximum sits on the first or last grid point: the supremum is not
  // resolved by the grid (e.g. the free particle as p -> 0).
  bool maximum_on_boundary = false;
  double classical_at_argmax = 0.0;
  // Classical dwell at E = 1.001 * max(V), infinite-limit comparison point.
  double classical_near_threshold = std::numeric_limits<double>::infinity();
  std::vector<double> t_plus;  // per grid point, in grid order
};

// Largest t_plus over a momentum grid, refined by golden-section search
// between the neighbours of the best grid point.
inline BoundScan dwell_bound_scan(const PiecewisePotential& pot, std::span<const double> grid,
                                  double mass, const PhysicalConstants& c = kSI) {
  if (grid.size() < 2) throw DomainError("bound scan needs at least two grid points");
  auto t_plus_at = [&](double p) {
    return at_regular_momentum(p, [&](double q) { return dwell_matrix(pot, q, mass, c).t_plus; });
  };
  BoundScan scan;
  scan.t_plus.reserve(grid.size());
  for (double p : grid) scan.t_plus.push_back(t_plus_at(p));

  const auto best = std::max_element(scan.t_plus.begin(), scan.t_plus.end());
  const std::size_t i = static_cast<std::size_t>(best - scan.t_plus.begin());
  scan.sup_t_plus = *best;
  scan.argmax_momentum = grid[i];
  scan.maximum_on_boundary = i == 0 || i + 1 == grid.size();

  if (!scan.maximum_on_boundary) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = grid[i - 1];
    double b = grid[i + 1];
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = t_plus_at(x1);
    double f2 = t_plus_at(x2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-13 * b; ++iter) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - ratio * (b - a);
        f1 = t_plus_at(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + ratio * (b - a);
        f2 = t_plus_at(x2);
      }
    }
    const double refined = std::max(f1, f2);
    if (refined > scan.sup_t_plus) {
      scan.sup_t_plus = refined;
      scan.argmax_momentum = f1 > f2 ? x1 : x2;
    }
  }

  scan.classical_at_argmax =
      classical_dwell(pot, scan.argmax_momentum * scan.argmax_momentum / (2.0 * mass), mass);
  const double v_max = pot.max_real();
  if (v_max > 0.0) scan.classical_near_threshold = classical_dwell(pot, 1.001 * v_max, mass);
  return scan;
}

}  // namespace dwelltime
