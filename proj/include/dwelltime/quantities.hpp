#pragma once

#include <cmath>
#include <string>
#include <tuple>

#include "dwelltime/errors.hpp"

namespace dwelltime {

// The constant set every formula is evaluated against. Pass kNatural to work
// with hbar = 1 (mass and lengths are then plain numbers chosen by the caller).
struct PhysicalConstants {
  double hbar;
};

inline constexpr PhysicalConstants kSI{1.054571817e-34};  // J s
inline constexpr PhysicalConstants kNatural{1.0};

inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kCesium133Mass = 132.905451961 * kAtomicMassUnit;

// cm/s <-> m/s at the CLI boundary.
inline constexpr double kCentimetrePerSecond = 1e-2;

struct ParticleSpec {
  double mass = 0.0;  // kg
  std::string label;
};

// Region D of interest, [left_edge, right_edge].
struct RegionSpec {
  double left_edge = 0.0;
  double right_edge = 0.0;

  double length() const { return right_edge - left_edge; }
  double center() const { return 0.5 * (left_edge + right_edge); }
  bool contains(double x) const { return x >= left_edge && x <= right_edge; }
};

struct Kinematics {
  double momentum = 0.0;  // kg m/s
  double velocity = 0.0;  // m/s
  double energy = 0.0;    // J
};

inline void validate(const ParticleSpec& particle) {
  if (!(particle.mass > 0.0) || !std::isfinite(particle.mass))
    throw DomainError("particle mass must be positive and finite");
}

inline void validate(const RegionSpec& region) {
  if (!(region.right_edge > region.left_edge) || !std::isfinite(region.left_edge) ||
      !std::isfinite(region.right_edge))
    throw DomainError("region right edge must lie strictly to the right of its left edge");
}

inline Kinematics convert(double velocity, double mass) {
  if (!(velocity > 0.0) || !std::isfinite(velocity))
    throw DomainError("velocity must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("mass must be positive");
  return {mass * velocity, velocity, 0.5 * mass * velocity * velocity};
}

inline Kinematics from_momentum(double momentum, double mass) {
  if (!(momentum > 0.0)) throw DomainError("momentum must be positive");
  if (!(mass > 0.0)) throw DomainError("mass must be positive");
  return {momentum, momentum / mass, momentum * momentum / (2.0 * mass)};
}

// Energy of a particle moving at `velocity`; used to express barrier heights as
// the velocity whose kinetic energy equals the barrier.
inline double energy_for_velocity(double velocity, double mass) {
  return 0.5 * mass * velocity * velocity;
}

struct CesiumSetup {
  ParticleSpec particle;
  RegionSpec region;
  double barrier_height;  // J
};

// Cs atoms crossing a 2 um region whose barrier corresponds to 0.28 cm/s.
inline CesiumSetup cesium_defaults() {
  CesiumSetup setup;
  setup.particle = {kCesium133Mass, "Cs"};
  setup.region = {0.0, 2.0e-6};
  setup.barrier_height = energy_for_velocity(0.28 * kCentimetrePerSecond, kCesium133Mass);
  return setup;
}

}  // namespace dwelltime
