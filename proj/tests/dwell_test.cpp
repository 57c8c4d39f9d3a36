#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dwelltime/dwell.hpp"
#include "test_support.hpp"

namespace dwelltime {
namespace {

constexpr double kPi = 3.14159265358979323846;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(FreeDwell, DegenerateAtPi) {
  const DwellPair t = free_dwell_eigenvalues(kPi, 1.0, 1.0, kNatural);
  EXPECT_NEAR(t.t_plus, 1.0 / kPi, 1e-15);
  EXPECT_NEAR(t.t_minus, 1.0 / kPi, 1e-15);
}

TEST(FreeDwell, HalfPi) {
  const DwellPair t = free_dwell_eigenvalues(kPi / 2, 1.0, 1.0, kNatural);
  EXPECT_NEAR(t.t_plus, (2 / kPi) * (1 + 2 / kPi), 1e-14);
  EXPECT_NEAR(t.t_minus, (2 / kPi) * (1 - 2 / kPi), 1e-14);
  EXPECT_NEAR(t.t_plus, 1.04190, 5e-6);
  EXPECT_NEAR(t.t_minus, 0.23134, 5e-6);
}

TEST(FreeDwell, SmallMomentumAsymptotics) {
  for (double p : {1e-3, 1e-4}) {
    const DwellPair t = free_dwell_eigenvalues(p, 1.0, 1.0, kNatural);
    EXPECT_NEAR(t.t_plus * p, 2.0, 1e-6);
    EXPECT_NEAR(t.t_minus / p, 1.0 / 6.0, 1e-6);
  }
  EXPECT_THROW(free_dwell_eigenvalues(0.0, 1.0, 1.0, kNatural), DomainError);
}

TEST(FreeDwell, SignedLabelsFollowSine) {
  // sin(3pi/2) < 0: the "+" formula gives the smaller eigenvalue.
  const DwellPair t = free_dwell_eigenvalues(1.5 * kPi, 1.0, 1.0, kNatural);
  EXPECT_LT(t.signed_plus, t.signed_minus);
  EXPECT_EQ(t.t_plus, t.signed_minus);
  EXPECT_EQ(t.t_minus, t.signed_plus);
}

TEST(BarrierDwell, ZeroHeightReducesToFree) {
  for (double p = 0.01; p < 30.0; p *= 1.13) {
    const DwellPair b = barrier_dwell_eigenvalues(p, 1.0, 0.0, 1.0, kNatural);
    const DwellPair f = free_dwell_eigenvalues(p, 1.0, 1.0, kNatural);
    EXPECT_NEAR(b.t_plus, f.t_plus, 1e-14 * f.t_plus);
    EXPECT_NEAR(b.t_minus, f.t_minus, 1e-13 * f.t_minus);
  }
}

TEST(BarrierDwell, NaturalUnitsExample) {
  const double s3 = std::sqrt(3.0);
  const double plus = 4.0 * (1.0 + std::sin(s3) / s3) / (7.0 + std::cos(s3));
  const double minus = 4.0 * (1.0 - std::sin(s3) / s3) / (7.0 - std::cos(s3));
  const DwellPair t = barrier_dwell_eigenvalues(2.0, 1.0, 0.5, 1.0, kNatural);
  EXPECT_NEAR(t.signed_plus, plus, 1e-14);
  EXPECT_NEAR(t.signed_minus, minus, 1e-14);
  const DwellSpectrum m =
      dwell_matrix(PiecewisePotential::square_barrier({0.0, 1.0}, 0.5), 2.0, 1.0, kNatural);
  EXPECT_LT(rel(m.t_plus, plus), 1e-10);
  EXPECT_LT(rel(m.t_minus, minus), 1e-10);
  EXPECT_NEAR(average_dwell(t), 0.5 * (plus + minus), 1e-14);
}

TEST(BarrierDwell, ClassicalLimit) {
  const CesiumSetup cs = cesium_defaults();
  const double l = cs.region.length();
  const double p = 1e3 * kSI.hbar / l;
  const DwellPair t = barrier_dwell_eigenvalues(p, l, cs.barrier_height, cs.particle.mass);
  const double classical = cs.particle.mass * l / p;
  EXPECT_NEAR(t.t_plus / classical, 1.0, 1e-3);
  EXPECT_NEAR(t.t_minus / classical, 1.0, 1e-3);
}

TEST(BarrierDwell, ContinuousThroughThreshold) {
  // q = 0 exactly: the minus branch is 0/0 in the raw formula.
  const double v0 = 0.5;
  const DwellPair at = barrier_dwell_eigenvalues(1.0, 1.0, v0, 1.0, kNatural);
  const DwellPair above = barrier_dwell_eigenvalues(1.0 + 1e-7, 1.0, v0, 1.0, kNatural);
  const DwellPair below = barrier_dwell_eigenvalues(1.0 - 1e-7, 1.0, v0, 1.0, kNatural);
  EXPECT_TRUE(std::isfinite(at.t_minus));
  EXPECT_LT(rel(at.t_minus, above.t_minus), 1e-6);
  EXPECT_LT(rel(at.t_minus, below.t_minus), 1e-6);
  EXPECT_LT(rel(at.t_plus, above.t_plus), 1e-6);
}

TEST(BarrierDwell, ScaledEvaluationForOpaqueBarriers) {
  // z = kappa l crosses the cosh scaling switch and the overflow point of cosh.
  const double p = 1.0;
  auto v0_for = [&](double z) { return 0.5 * (z * z + p * p); };
  const DwellPair lo = barrier_dwell_eigenvalues(p, 1.0, v0_for(30.0 - 1e-9), 1.0, kNatural);
  const DwellPair hi = barrier_dwell_eigenvalues(p, 1.0, v0_for(30.0 + 1e-9), 1.0, kNatural);
  EXPECT_LT(rel(lo.t_plus, hi.t_plus), 1e-8);
  EXPECT_LT(rel(lo.t_minus, hi.t_minus), 1e-8);
  const DwellPair edge_lo = barrier_dwell_eigenvalues(p, 1.0, v0_for(699.9), 1.0, kNatural);
  const DwellPair edge_hi = barrier_dwell_eigenvalues(p, 1.0, v0_for(710.1), 1.0, kNatural);
  EXPECT_LT(rel(edge_lo.t_minus * 699.9 * 699.9 * 699.9, edge_hi.t_minus * 710.1 * 710.1 * 710.1),
            1e-3);
  const DwellPair far = barrier_dwell_eigenvalues(p, 1.0, v0_for(5000.0), 1.0, kNatural);
  EXPECT_TRUE(std::isfinite(far.t_plus) && far.t_plus > 0.0);
  EXPECT_TRUE(std::isfinite(far.t_minus) && far.t_minus > 0.0);
  const DwellSpectrum m =
      dwell_matrix(PiecewisePotential::square_barrier({0.0, 1.0}, v0_for(800.0)), p, 1.0, kNatural);
  const DwellPair a = barrier_dwell_eigenvalues(p, 1.0, v0_for(800.0), 1.0, kNatural);
  EXPECT_LT(rel(m.t_plus, a.t_plus), 1e-8);
  EXPECT_LT(rel(m.t_minus, a.t_minus), 1e-8);
}

TEST(BarrierDwell, PreconditionsAndPoles) {
  EXPECT_THROW(barrier_dwell_eigenvalues(0.0, 1.0, 1.0, 1.0, kNatural), DomainError);
  EXPECT_THROW(barrier_dwell_eigenvalues(1.0, 0.0, 1.0, 1.0, kNatural), DomainError);
  try {
    detail::sorted_pair(std::numeric_limits<double>::infinity(), 1.0, 0.25);
    FAIL() << "expected a pole error";
  } catch (const PoleError& e) {
    EXPECT_EQ(e.momentum(), 0.25);
  }
}

TEST(DwellMatrix, FreeParticleElements) {
  for (double p : {0.3, 1.0, kPi, 4.2}) {
    const DwellSpectrum s =
        dwell_matrix(PiecewisePotential::free({0.0, 1.0}), p, 1.0, kNatural);
    EXPECT_NEAR(s.matrix[0][0].real(), 1.0 / p, 1e-14);
    EXPECT_NEAR(s.matrix[1][1].real(), 1.0 / p, 1e-14);
    EXPECT_NEAR(std::abs(s.matrix[0][1]), std::abs(std::sin(p)) / (p * p), 1e-14);
    const DwellPair f = free_dwell_eigenvalues(p, 1.0, 1.0, kNatural);
    EXPECT_LT(rel(s.t_plus, f.t_plus), 1e-12);
    EXPECT_NEAR(s.t_minus, f.t_minus, 1e-12 * f.t_plus);
    EXPECT_NEAR(average_dwell(s), 1.0 / p, 1e-14);
  }
}

TEST(DwellMatrix, AnalyticBarrierAgreementNatural) {
  for (double v0 : {0.5, 2.0, -1.0, 7.0}) {
    const auto pot = PiecewisePotential::square_barrier({0.0, 1.0}, v0);
    for (int i = 0; i < 200; ++i) {
      const double p = 0.05 + 0.03 * i;
      if (std::abs(p * p - 2.0 * v0) < 1e-9) continue;
      const DwellSpectrum m = dwell_matrix(pot, p, 1.0, kNatural);
      const DwellPair a = barrier_dwell_eigenvalues(p, 1.0, v0, 1.0, kNatural);
      EXPECT_LT(rel(m.t_plus, a.t_plus), 1e-8) << "v0=" << v0 << " p=" << p;
      EXPECT_LT(rel(m.t_minus, a.t_minus), 1e-8) << "v0=" << v0 << " p=" << p;
    }
  }
}

TEST(DwellMatrix, RegionCentredAnywhere) {
  // The phase convention references x = 0; eigenvalues must not care.
  const auto shifted = PiecewisePotential::square_barrier({5.3, 6.3}, 0.7);
  const DwellSpectrum m = dwell_matrix(shifted, 1.4, 1.0, kNatural);
  const DwellPair a = barrier_dwell_eigenvalues(1.4, 1.0, 0.7, 1.0, kNatural);
  EXPECT_LT(rel(m.t_plus, a.t_plus), 1e-10);
  EXPECT_LT(rel(m.t_minus, a.t_minus), 1e-10);
}

TEST(DwellMatrix, HermitianPositiveOnRandomPotentials) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pot = testing::random_real_potential(rng);
    const double p = testing::random_momentum(rng);
    const DwellSpectrum s = dwell_matrix(pot, p, 1.0, kNatural);
    EXPECT_GT(s.t_minus, 0.0);
    EXPECT_GE(s.t_plus, s.t_minus);
    EXPECT_EQ(s.average, 0.5 * (s.t_plus + s.t_minus));
    EXPECT_EQ(s.matrix[0][1], std::conj(s.matrix[1][0]));
  }
}

TEST(DwellMatrix, SymmetricPotentialHasEqualDiagonal) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pot = testing::random_symmetric_potential(rng, false);
    const double p = testing::random_momentum(rng);
    const DwellSpectrum s = dwell_matrix(pot, p, 1.0, kNatural);
    EXPECT_NEAR(s.matrix[0][0].real(), s.matrix[1][1].real(),
                1e-10 * s.matrix[0][0].real());
  }
}

TEST(DwellMatrix, RejectsComplexPotential) {
  const auto pot = PiecewisePotential::strip({0.0, 1.0}, complex(0.2, -0.1));
  EXPECT_THROW(dwell_matrix(pot, 1.0, 1.0, kNatural), DomainError);
}

TEST(DwellMatrix, BuettikerDwellIsDiagonalElement) {
  // (m/p) integral |psi_left|^2 by brute-force midpoint quadrature.
  const auto pot = PiecewisePotential(std::vector<double>{0.0, 0.4, 1.0},
                                      std::vector<complex>{1.3, -0.4}, RegionSpec{-0.2, 1.1});
  const double p = 1.2;
  const WaveField psi = wavefunction(pot, p, Incidence::left, 1.0, kNatural);
  const int n = 200000;
  const double h = 1.3 / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::norm(psi(-0.2 + (i + 0.5) * h)) * h;
  const DwellSpectrum s = dwell_matrix(pot, p, 1.0, kNatural);
  EXPECT_NEAR(s.matrix[0][0].real(), sum / p, 1e-8);
}

TEST(Degeneracy, FreeSpectrumAtMultiplesOfPi) {
  for (int n = 1; n <= 10; ++n) {
    const DwellSpectrum s =
        dwell_matrix(PiecewisePotential::free({0.0, 1.0}), n * kPi, 1.0, kNatural);
    EXPECT_LT(s.t_plus - s.t_minus, 1e-10 * s.t_plus);
    EXPECT_NEAR(average_dwell(s), s.t_plus, 1e-10 * s.t_plus);
    const DwellPair f = free_dwell_eigenvalues(n * kPi, 1.0, 1.0, kNatural);
    EXPECT_LT(splitting_ratio(f.t_plus, f.t_minus), 1e-10);
  }
}

TEST(Interleaving, BarrierExtremaAlternate) {
  const double v0 = 5.0;
  std::vector<double> tp, tm;
  for (double p = 3.2; p < 25.0; p += 0.002) {
    const DwellPair t = barrier_dwell_eigenvalues(p, 1.0, v0, 1.0, kNatural);
    tp.push_back(t.t_plus);
    tm.push_back(t.t_minus);
  }
  auto maxima = [](const std::vector<double>& f) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
      if (f[i] > f[i - 1] && f[i] >= f[i + 1]) idx.push_back(i);
    return idx;
  };
  auto extrema = [](const std::vector<double>& f) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
      if ((f[i] - f[i - 1]) * (f[i + 1] - f[i]) <= 0.0) idx.push_back(i);
    return idx;
  };
  const auto plus_max = maxima(tp);
  const auto minus_ext = extrema(tm);
  ASSERT_GE(plus_max.size(), 3u);
  for (std::size_t k = 0; k + 1 < plus_max.size(); ++k) {
    const bool between = std::any_of(minus_ext.begin(), minus_ext.end(), [&](std::size_t i) {
      return i > plus_max[k] && i < plus_max[k + 1];
    });
    EXPECT_TRUE(between) << "between maxima " << k << " and " << k + 1;
  }
}

TEST(BoundScan, CesiumBarrierIsBoundedAndConverged) {
  const CesiumSetup cs = cesium_defaults();
  const auto pot = PiecewisePotential::square_barrier(cs.region, cs.barrier_height);
  const double pb = cs.particle.mass * 2.8e-3;
  auto grid = [&](int n) {
    std::vector<double> g;
    for (int i = 1; i <= n; ++i) g.push_back(20.0 * pb * i / n);
    return g;
  };
  const BoundScan coarse = dwell_bound_scan(pot, grid(400), cs.particle.mass);
  const BoundScan fine = dwell_bound_scan(pot, grid(800), cs.particle.mass);
  EXPECT_FALSE(coarse.maximum_on_boundary);
  EXPECT_TRUE(std::isfinite(coarse.sup_t_plus));
  EXPECT_LT(rel(coarse.sup_t_plus, fine.sup_t_plus), 1e-3);
  EXPECT_GT(classical_dwell(pot, 1.001 * cs.barrier_height, cs.particle.mass), coarse.sup_t_plus);
  EXPECT_GT(coarse.classical_near_threshold, coarse.sup_t_plus);
}

TEST(BoundScan, FreeParticleDiverges) {
  const auto pot = PiecewisePotential::free({0.0, 1.0});
  for (double p_min : {1e-1, 1e-2, 1e-3}) {
    std::vector<double> g;
    for (int i = 0; i < 50; ++i) g.push_back(p_min * std::pow(10.0, 3.0 * i / 49.0));
    const BoundScan scan = dwell_bound_scan(pot, g, 1.0, kNatural);
    EXPECT_TRUE(scan.maximum_on_boundary);
    EXPECT_DOUBLE_EQ(scan.argmax_momentum, p_min);
    EXPECT_NEAR(scan.sup_t_plus * p_min, 2.0, 0.01);
  }
}

TEST(ClassicalDwell, ReflectsBelowBarrier) {
  const auto pot = PiecewisePotential(std::vector<double>{0.0, 1.0}, std::vector<complex>{2.0},
                                      RegionSpec{-1.0, 1.0});
  EXPECT_DOUBLE_EQ(classical_dwell(pot, 0.5, 1.0), 2.0);  // 1 unit at v = 1, there and back
  EXPECT_NEAR(classical_dwell(pot, 8.0, 1.0), 0.25 + 1.0 / std::sqrt(12.0), 1e-15);
}

TEST(OnShellExpectation, PhaseInvariance) {
  const DwellSpectrum s = dwell_matrix(
      PiecewisePotential(std::vector<double>{0.0, 0.3, 1.0}, std::vector<complex>{0.9, 0.2},
                         RegionSpec{0.0, 1.0}),
      1.7, 1.0, kNatural);
  EXPECT_DOUBLE_EQ(on_shell_expectation(s, {1.0, 0.0}), s.matrix[0][0].real());
  for (double theta : {0.3, 1.9, -2.4}) {
    const complex ph = std::polar(1.0, theta);
    EXPECT_NEAR(on_shell_expectation(s, {ph, 0.0}), s.matrix[0][0].real(), 1e-15);
    const std::array<complex, 2> c{ph * 0.6, ph * complex(0.0, 0.8)};
    EXPECT_NEAR(on_shell_expectation(s, c), on_shell_expectation(s, {0.6, complex(0.0, 0.8)}),
                1e-14);
  }
  EXPECT_THROW(on_shell_expectation(s, {1.0, 1.0}), DomainError);
}

TEST(OnShellExpectation, FreeSymmetricAntisymmetric) {
  const double p = 1.1;
  const DwellSpectrum s = dwell_matrix(PiecewisePotential::free({0.0, 1.0}), p, 1.0, kNatural);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(on_shell_expectation(s, {r, r}), s.matrix[0][0].real() + s.matrix[0][1].real(),
              1e-14);
  EXPECT_NEAR(on_shell_expectation(s, {r, -r}), s.matrix[0][0].real() - s.matrix[0][1].real(),
              1e-14);
}

}  // namespace
}  // namespace dwelltime
