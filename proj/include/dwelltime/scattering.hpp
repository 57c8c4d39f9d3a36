#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "dwelltime/errors.hpp"
#include "dwelltime/potential.hpp"
#include "dwelltime/quantities.hpp"

namespace dwelltime {

enum class Incidence { left, right };

// How the per-segment matrices are accumulated. `automatic` uses transfer
// matrices unless some segment has |Im k| * width > kEvanescentLimit, in which
// case the scattering-matrix (Redheffer star) composition is used.
enum class Composition { automatic, transfer_matrix, scattering_matrix };

inline constexpr double kEvanescentLimit = 30.0;
inline constexpr double kUnitarityTolerance = 1e-12;

// Amplitudes referenced to plane waves e^{+-ipx/hbar} anchored at x = 0:
//   left incidence:  e^{ipx} + r_left e^{-ipx}  |  t_left e^{ipx}
//   right incidence: t_right e^{-ipx}           |  e^{-ipx} + r_right e^{ipx}
struct ScatteringSolution {
  double momentum = 0.0;
  complex t_left, r_left;
  complex t_right, r_right;
  double absorption_left = 0.0;
  double absorption_right = 0.0;

  complex transmission(Incidence inc) const { return inc == Incidence::left ? t_left : t_right; }
  complex reflection(Incidence inc) const { return inc == Incidence::left ? r_left : r_right; }
};

// A = 1 - |t|^2 - |r|^2, clamped onto [0, 1] only inside the round-off band.
inline double absorption_probability(const ScatteringSolution& sol, Incidence inc) {
  const double a = 1.0 - std::norm(sol.transmission(inc)) - std::norm(sol.reflection(inc));
  if (a < -kUnitarityTolerance || a > 1.0 + kUnitarityTolerance)
    throw UnitarityViolation("absorption outside [0, 1]: unitarity violated");
  return std::clamp(a, 0.0, 1.0);
}

namespace detail {

// sqrt(2m(E - V))/hbar on the branch Im k >= 0.
inline complex local_wavenumber(double momentum, complex v, double mass,
                                const PhysicalConstants& c) {
  const complex arg = complex(momentum * momentum, 0.0) - 2.0 * mass * v;
  const double scale = std::max(momentum * momentum, 2.0 * mass * std::abs(v));
  if (std::abs(arg) <= 8.0 * std::numeric_limits<double>::epsilon() * scale)
    throw DegenerateWavenumberError(
        "incident energy equals a segment potential (k = 0); perturb the momentum");
  complex k = std::sqrt(arg) / c.hbar;
  if (k.imag() < 0.0) k = -k;
  return k;
}

// Scalar two-port scattering matrix between local reference planes.
//   out_left  = r_l * in_left + t_r * in_right
//   out_right = t_l * in_left + r_r * in_right
struct SMatrix {
  complex r_l{0.0, 0.0};
  complex t_l{1.0, 0.0};
  complex t_r{1.0, 0.0};
  complex r_r{0.0, 0.0};
};

// Redheffer star product: `a` on the left, `b` on the right.
inline SMatrix star(const SMatrix& a, const SMatrix& b) {
  const complex d = 1.0 / (1.0 - a.r_r * b.r_l);
  SMatrix s;
  s.r_l = a.r_l + a.t_r * b.r_l * a.t_l * d;
  s.t_l = b.t_l * a.t_l * d;
  s.t_r = a.t_r * b.t_r * d;
  s.r_r = b.r_r + b.t_l * a.r_r * b.t_r * d;
  return s;
}

inline SMatrix interface_smatrix(complex k1, complex k2) {
  const complex inv = 1.0 / (k1 + k2);
  return {(k1 - k2) * inv, 2.0 * k1 * inv, 2.0 * k2 * inv, (k2 - k1) * inv};
}

inline SMatrix propagation_smatrix(complex k, double width) {
  const complex ph = std::exp(complex(0.0, 1.0) * k * width);
  return {complex{}, ph, ph, complex{}};
}

// Wavenumbers of the segments plus the exterior wavenumber p/hbar.
struct Layers {
  complex k_outside;
  std::vector<complex> k;
  std::vector<double> left;
  std::vector<double> width;
};

inline Layers build_layers(const PiecewisePotential& pot, double momentum, double mass,
                           const PhysicalConstants& c) {
  if (!(momentum > 0.0)) throw DomainError("incident momentum must be positive");
  validate(ParticleSpec{mass, {}});
  Layers layers;
  layers.k_outside = complex(momentum / c.hbar, 0.0);
  const auto bp = pot.breakpoints();
  const auto vals = pot.values();
  for (std::size_t j = 0; j < vals.size(); ++j) {
    layers.k.push_back(local_wavenumber(momentum, vals[j], mass, c));
    layers.left.push_back(bp[j]);
    layers.width.push_back(bp[j + 1] - bp[j]);
  }
  return layers;
}

// Elements e_0 .. e_{2N}: interface into segment s at index 2s, propagation
// through s at index 2s+1, final interface back to the exterior at 2N.
inline std::vector<SMatrix> element_chain(const Layers& layers) {
  const std::size_t n = layers.k.size();
  std::vector<SMatrix> chain;
  chain.reserve(2 * n + 1);
  complex previous = layers.k_outside;
  for (std::size_t s = 0; s < n; ++s) {
    chain.push_back(interface_smatrix(previous, layers.k[s]));
    chain.push_back(propagation_smatrix(layers.k[s], layers.width[s]));
    previous = layers.k[s];
  }
  chain.push_back(interface_smatrix(previous, layers.k_outside));
  return chain;
}

inline SMatrix compose_scattering(const Layers& layers) {
  SMatrix total;
  for (const SMatrix& e : element_chain(layers)) total = star(total, e);
  return total;
}

using Mat2 = std::array<complex, 4>;  // row-major

inline Mat2 multiply(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// Transfer matrices map (right-moving, left-moving) amplitudes at a reference
// plane to those at the next plane.
inline SMatrix compose_transfer(const Layers& layers) {
  const complex i(0.0, 1.0);
  Mat2 total{1.0, 0.0, 0.0, 1.0};
  complex previous = layers.k_outside;
  auto interface = [](complex k1, complex k2) {
    const complex inv = 1.0 / (2.0 * k2);
    return Mat2{(k2 + k1) * inv, (k2 - k1) * inv, (k2 - k1) * inv, (k2 + k1) * inv};
  };
  for (std::size_t s = 0; s < layers.k.size(); ++s) {
    total = multiply(interface(previous, layers.k[s]), total);
    const complex ph = std::exp(i * layers.k[s] * layers.width[s]);
    total = multiply(Mat2{ph, 0.0, 0.0, 1.0 / ph}, total);
    previous = layers.k[s];
  }
  total = multiply(interface(previous, layers.k_outside), total);
  const complex det = total[0] * total[3] - total[1] * total[2];
  SMatrix s;
  s.t_l = det / total[3];
  s.r_l = -total[2] / total[3];
  s.t_r = 1.0 / total[3];
  s.r_r = total[1] / total[3];
  return s;
}

inline bool strongly_evanescent(const Layers& layers) {
  for (std::size_t s = 0; s < layers.k.size(); ++s) {
    if (std::abs(layers.k[s].imag()) * layers.width[s] > kEvanescentLimit) return true;
  }
  return false;
}

// (e^z - 1)/z without cancellation near z = 0.
inline complex expm1_over(complex z) {
  if (std::abs(z) < 0.5) {
    complex term = 1.0;
    complex sum = 1.0;
    for (int n = 1; n < 20; ++n) {
      term *= z / static_cast<double>(n + 1);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

}  // namespace detail

inline ScatteringSolution solve_scattering(const PiecewisePotential& pot, double momentum,
                                           double mass, const PhysicalConstants& c = kSI,
                                           Composition method = Composition::automatic) {
  const detail::Layers layers = detail::build_layers(pot, momentum, mass, c);
  ScatteringSolution sol;
  sol.momentum = momentum;
  if (pot.empty()) {
    sol.t_left = sol.t_right = 1.0;
    sol.r_left = sol.r_right = 0.0;
    return sol;
  }
  const bool use_smatrix =
      method == Composition::scattering_matrix ||
      (method == Composition::automatic && detail::strongly_evanescent(layers));
  const detail::SMatrix local =
      use_smatrix ? detail::compose_scattering(layers) : detail::compose_transfer(layers);

  const complex i(0.0, 1.0);
  const complex k0 = layers.k_outside;
  const double x0 = pot.breakpoints().front();
  const double xn = pot.breakpoints().back();
  sol.r_left = local.r_l * std::exp(2.0 * i * k0 * x0);
  sol.t_left = local.t_l * std::exp(i * k0 * (x0 - xn));
  sol.r_right = local.r_r * std::exp(-2.0 * i * k0 * xn);
  sol.t_right = local.t_r * std::exp(i * k0 * (x0 - xn));
  sol.absorption_left = absorption_probability(sol, Incidence::left);
  sol.absorption_right = absorption_probability(sol, Incidence::right);
  return sol;
}

// Stationary scattering state inside one constant piece:
//   psi(x) = a e^{ik(x - a_ref)} + b e^{-ik(x - b_ref)}
struct WavePiece {
  double lower;
  double upper;
  complex k;
  complex a;
  double a_ref;
  complex b;
  double b_ref;

  complex value(double x) const {
    const complex i(0.0, 1.0);
    return a * std::exp(i * k * (x - a_ref)) + b * std::exp(-i * k * (x - b_ref));
  }
  complex slope(double x) const {
    const complex i(0.0, 1.0);
    return i * k * (a * std::exp(i * k * (x - a_ref)) - b * std::exp(-i * k * (x - b_ref)));
  }
};

// Closed-form representation of a unit-incident-amplitude stationary state.
class WaveField {
 public:
  explicit WaveField(std::vector<WavePiece> pieces) : pieces_(std::move(pieces)) {}

  std::span<const WavePiece> pieces() const { return pieces_; }

  // A point on a breakpoint is evaluated with the piece on its right.
  const WavePiece& piece_at(double x) const {
    auto it = std::upper_bound(pieces_.begin() + 1, pieces_.end(), x,
                               [](double v, const WavePiece& p) { return v < p.lower; });
    return *(it - 1);
  }

  complex operator()(double x) const { return piece_at(x).value(x); }
  complex derivative(double x) const { return piece_at(x).slope(x); }

 private:
  std::vector<WavePiece> pieces_;
};

inline WaveField wavefunction(const PiecewisePotential& pot, double momentum, Incidence inc,
                              double mass, const PhysicalConstants& c = kSI) {
  const detail::Layers layers = detail::build_layers(pot, momentum, mass, c);
  const complex i(0.0, 1.0);
  const complex k0 = layers.k_outside;
  constexpr double inf = std::numeric_limits<double>::infinity();

  if (pot.empty()) {
    const WavePiece piece = inc == Incidence::left
                                ? WavePiece{-inf, inf, k0, 1.0, 0.0, 0.0, 0.0}
                                : WavePiece{-inf, inf, k0, 0.0, 0.0, 1.0, 0.0};
    return WaveField({piece});
  }

  const double x0 = pot.breakpoints().front();
  const double xn = pot.breakpoints().back();
  const complex in_left = inc == Incidence::left ? std::exp(i * k0 * x0) : complex{};
  const complex in_right = inc == Incidence::right ? std::exp(-i * k0 * xn) : complex{};

  const std::vector<detail::SMatrix> chain = detail::element_chain(layers);
  const std::size_t m = chain.size();
  std::vector<detail::SMatrix> prefix(m), suffix(m + 1);
  prefix[0] = chain[0];
  for (std::size_t e = 1; e < m; ++e) prefix[e] = detail::star(prefix[e - 1], chain[e]);
  for (std::size_t e = m; e-- > 0;) suffix[e] = detail::star(chain[e], suffix[e + 1]);
  const detail::SMatrix& total = prefix[m - 1];

  std::vector<WavePiece> pieces;
  pieces.reserve(layers.k.size() + 2);
  const complex out_left = total.r_l * in_left + total.t_r * in_right;
  const complex out_right = total.t_l * in_left + total.r_r * in_right;
  pieces.push_back({-inf, x0, k0, in_left, x0, out_left, x0});

  for (std::size_t s = 0; s < layers.k.size(); ++s) {
    const detail::SMatrix& lhs = prefix[2 * s];
    const detail::SMatrix& rhs = suffix[2 * s + 2];
    const complex ph = std::exp(i * layers.k[s] * layers.width[s]);
    // a: right-moving amplitude at the left edge; b: left-moving at the right edge.
    const complex a = (lhs.t_l * in_left + lhs.r_r * ph * rhs.t_r * in_right) /
                      (1.0 - lhs.r_r * rhs.r_l * ph * ph);
    const complex b = rhs.r_l * a * ph + rhs.t_r * in_right;
    const double lo = layers.left[s];
    const double hi = lo + layers.width[s];
    pieces.push_back({lo, hi, layers.k[s], a, lo, b, hi});
  }
  pieces.push_back({xn, inf, k0, out_right, xn, in_right, xn});
  return WaveField(std::move(pieces));
}

namespace detail {

// Integral of conj(psi_a) psi_b over [u, v] for two states sharing a piece.
inline complex overlap(const WavePiece& pa, const WavePiece& pb, double u, double v) {
  if (!(v > u)) return {};
  const complex i(0.0, 1.0);
  const double len = v - u;
  const std::array<complex, 2> sa{i * pa.k, -i * pa.k};
  const std::array<complex, 2> ca{pa.a, pa.b};
  const std::array<double, 2> ra{pa.a_ref, pa.b_ref};
  const std::array<complex, 2> sb{i * pb.k, -i * pb.k};
  const std::array<complex, 2> cb{pb.a, pb.b};
  const std::array<double, 2> rb{pb.a_ref, pb.b_ref};
  complex sum;
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      const complex coef = std::conj(ca[m]) * cb[n];
      if (coef == complex{}) continue;
      const complex sigma = std::conj(sa[m]) + sb[n];
      // Anchor at the endpoint where the integrand is largest.
      const double anchor = sigma.real() <= 0.0 ? u : v;
      const complex edge =
          coef * std::exp(std::conj(sa[m]) * (anchor - ra[m]) + sb[n] * (anchor - rb[n]));
      const complex z = sigma.real() <= 0.0 ? sigma * len : -sigma * len;
      sum += edge * len * expm1_over(z);
    }
  }
  return sum;
}

}  // namespace detail

// (m/p) * integral over [u, v] of conj(psi_a) psi_b for two states of the same
// potential and momentum.
inline complex weighted_overlap(const WaveField& psi_a, const WaveField& psi_b, double u,
                                double v) {
  const auto pa = psi_a.pieces();
  const auto pb = psi_b.pieces();
  complex sum;
  for (std::size_t j = 0; j < pa.size(); ++j) {
    const double lo = std::max(u, pa[j].lower);
    const double hi = std::min(v, pa[j].upper);
    sum += detail::overlap(pa[j], pb[j], lo, hi);
  }
  return sum;
}

// Absorbed fraction from the flux balance of the continuity equation:
//   A = (2/hbar)(m/p) * sum_j V_I,j * integral_j |psi|^2.
// Accurate even when A is far below the round-off floor of 1 - |t|^2 - |r|^2.
inline double absorbed_fraction(const PiecewisePotential& pot, double momentum, Incidence inc,
                                double mass, const PhysicalConstants& c = kSI) {
  const WaveField psi = wavefunction(pot, momentum, inc, mass, c);
  const auto pieces = psi.pieces();
  const auto vals = pot.values();
  double sum = 0.0;
  for (std::size_t j = 0; j < vals.size(); ++j) {
    const double v_imag = -vals[j].imag();
    if (v_imag == 0.0) continue;
    const WavePiece& piece = pieces[j + 1];
    sum += v_imag * detail::overlap(piece, piece, piece.lower, piece.upper).real();
  }
  return 2.0 * mass * sum / (c.hbar * momentum);
}

}  // namespace dwelltime
