#include <gtest/gtest.h>

#include <cmath>

#include "dwelltime/quantities.hpp"

namespace dwelltime {
namespace {

TEST(Quantities, CesiumDefaults) {
  const CesiumSetup cs = cesium_defaults();
  EXPECT_DOUBLE_EQ(cs.region.length(), 2.0e-6);
  EXPECT_EQ(cs.particle.label, "Cs");
  EXPECT_NEAR(cs.particle.mass, 2.2069e-25, 1e-29);
  // Barrier expressed back as a velocity: 0.28 cm/s.
  EXPECT_NEAR(std::sqrt(2.0 * cs.barrier_height / cs.particle.mass), 2.8e-3, 1e-15);
  EXPECT_NEAR(cs.barrier_height, 8.65e-31, 0.005e-31);
}

TEST(Quantities, ConvertUnitValues) {
  const Kinematics k = convert(1.0, 1.0);
  EXPECT_DOUBLE_EQ(k.momentum, 1.0);
  EXPECT_DOUBLE_EQ(k.velocity, 1.0);
  EXPECT_DOUBLE_EQ(k.energy, 0.5);
}

TEST(Quantities, ConvertCesiumThreshold) {
  const Kinematics k = convert(2.8e-3, 2.2069e-25);
  EXPECT_NEAR(k.momentum, 6.17932e-28, 1e-33);
  EXPECT_DOUBLE_EQ(k.energy, k.momentum * k.momentum / (2.0 * 2.2069e-25));
}

TEST(Quantities, ConvertRejectsNonPositive) {
  EXPECT_THROW(convert(0.0, 1.0), DomainError);
  EXPECT_THROW(convert(-1.0, 1.0), DomainError);
  EXPECT_THROW(convert(1.0, 0.0), DomainError);
  EXPECT_THROW(from_momentum(0.0, 1.0), DomainError);
}

TEST(Quantities, RoundTripOverTwelveDecades) {
  const double mass = kCesium133Mass;
  for (int e = -8; e <= 4; ++e) {
    for (double mant : {1.0, 2.5, 7.3}) {
      const double v = mant * std::pow(10.0, e);
      EXPECT_NEAR(convert(v, mass).momentum / mass, v, 2e-16 * v);
    }
  }
}

TEST(Quantities, EnergyStrictlyIncreasingInMomentum) {
  double previous = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double e = from_momentum(1e-30 * i * i, kCesium133Mass).energy;
    EXPECT_GT(e, previous);
    previous = e;
  }
}

TEST(Quantities, RegionValidation) {
  EXPECT_THROW(validate(RegionSpec{1.0, 1.0}), DomainError);
  EXPECT_THROW(validate(RegionSpec{1.0, -1.0}), DomainError);
  EXPECT_NO_THROW(validate(RegionSpec{-1.0, 1.0}));
  EXPECT_THROW(validate(ParticleSpec{0.0, "x"}), DomainError);
}

}  // namespace
}  // namespace dwelltime
