#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dwelltime/dwell.hpp"
#include "dwelltime/operational.hpp"
#include "dwelltime/quantities.hpp"
#include "dwelltime/scattering.hpp"

namespace dwelltime {

struct VerifyOptions {
  // Relative change of hbar fed to the closed-form side only. Nonzero values
  // exist to check that the oracle comparisons notice.
  double hbar_perturbation = 0.0;
  unsigned long long seed = 20240611;
};

struct PropertyCheck {
  std::string name;
  bool passed;
  double worst;      // worst observed deviation
  double tolerance;
};

namespace detail {

inline PiecewisePotential verify_random_potential(std::mt19937_64& rng, bool symmetric) {
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> width(0.05, 1.0);
  std::uniform_real_distribution<double> height(-3.0, 3.0);
  const int n = count(rng);
  std::vector<double> half{0.1};
  std::vector<complex> vals;
  for (int j = 0; j < n; ++j) {
    half.push_back(half.back() + width(rng));
    vals.emplace_back(height(rng), 0.0);
  }
  if (!symmetric) return {half, vals, RegionSpec{0.0, half.back() + 0.2}};
  std::vector<double> bp;
  std::vector<complex> all;
  for (auto it = half.rbegin(); it != half.rend(); ++it) bp.push_back(-*it);
  for (double x : half) bp.push_back(x);
  for (auto it = vals.rbegin(); it != vals.rend(); ++it) all.push_back(*it);
  all.emplace_back(height(rng), 0.0);
  for (const complex& v : vals) all.push_back(v);
  return {bp, all, RegionSpec{-half.back() - 0.2, half.back() + 0.2}};
}

inline double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace detail

// Oracle-equivalence suite on the Cs barrier and on random natural-unit
// potentials.
inline std::vector<PropertyCheck> run_verification(const VerifyOptions& options = {}) {
  std::vector<PropertyCheck> checks;
  const CesiumSetup cs = cesium_defaults();
  const double mass = cs.particle.mass;
  const double l = cs.region.length();
  const PiecewisePotential barrier = PiecewisePotential::square_barrier(cs.region, cs.barrier_height);
  const PhysicalConstants analytic{kSI.hbar * (1.0 + options.hbar_perturbation)};
  const double threshold = std::sqrt(2.0 * mass * cs.barrier_height);

  {
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
      const double p = threshold * 0.2 * std::pow(100.0, i / 59.0);
      const DwellSpectrum m =
          at_regular_momentum(p, [&](double q) { return dwell_matrix(barrier, q, mass); });
      const DwellPair a = barrier_dwell_eigenvalues(m.momentum, l, cs.barrier_height, mass, analytic);
      worst = std::max({worst, detail::relative(a.t_plus, m.t_plus),
                        detail::relative(a.t_minus, m.t_minus)});
    }
    checks.push_back({"barrier_eigenvalues_analytic_vs_matrix", worst < 1e-8, worst, 1e-8});
  }
  {
    double worst = 0.0;
    for (double f : {0.5, 0.9, 1.1, 2.0, 5.0}) {
      const double p = threshold * f;
      const double avg = dwell_matrix(barrier, p, mass).average;
      const double lim = dwell_via_absorption_derivative(barrier, p, mass).value;
      worst = std::max(worst, detail::relative(lim, avg));
    }
    checks.push_back({"barrier_average_vs_absorption_derivative", worst < 1e-4, worst, 1e-4});
  }
  {
    const PiecewisePotential free = PiecewisePotential::free(cs.region);
    double worst = 0.0;
    for (double f : {0.3, 1.0, 3.0, 10.0}) {
      const double p = threshold * f;
      const double lim = dwell_via_absorption_derivative(free, p, mass).value;
      worst = std::max(worst, detail::relative(lim, mass * l / p));
    }
    checks.push_back({"free_average_is_classical", worst < 1e-6, worst, 1e-6});
  }
  {
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
      const double p = n * std::numbers::pi * analytic.hbar / l;
      const DwellSpectrum m = dwell_matrix(PiecewisePotential::free(cs.region), p, mass);
      worst = std::max(worst, splitting_ratio(m.t_plus, m.t_minus));
    }
    checks.push_back({"free_degeneracy_at_n_pi", worst < 1e-10, worst, 1e-10});
  }
  {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> momentum(0.2, 3.0);
    double unitarity = 0.0;
    double parity = 0.0;
    for (int i = 0; i < 300; ++i) {
      const double p = momentum(rng);
      const ScatteringSolution s =
          solve_scattering(detail::verify_random_potential(rng, false), p, 1.0, kNatural);
      unitarity = std::max(unitarity, std::abs(std::norm(s.t_left) + std::norm(s.r_left) - 1.0));
      const ScatteringSolution sym =
          solve_scattering(detail::verify_random_potential(rng, true), p, 1.0, kNatural);
      parity = std::max(parity, std::abs(sym.r_left - sym.r_right));
    }
    checks.push_back({"unitarity_random_real", unitarity < 1e-10, unitarity, 1e-10});
    checks.push_back({"parity_symmetric", parity < 1e-10, parity, 1e-10});
  }
  {
    const double p = 1e3 * analytic.hbar / l;
    const DwellPair a = barrier_dwell_eigenvalues(p, l, cs.barrier_height, mass, kSI);
    const double classical = mass * l / p;
    const double worst = std::max(std::abs(a.t_plus / classical - 1.0),
                                  std::abs(a.t_minus / classical - 1.0));
    checks.push_back({"classical_limit", worst <= 1e-3, worst, 1e-3});
  }
  {
    const FeasibilityScan scan = fluorescence_feasibility_scan();
    checks.push_back({"fluorescence_infeasible", scan.feasible == 0,
                      static_cast<double>(scan.feasible), 0.0});
  }
  return checks;
}

}  // namespace dwelltime
