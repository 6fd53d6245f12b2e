#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "oracles/frozen_values.hpp"
#include "oracles/oracles.hpp"
#include "weyl1d/convexity.hpp"
#include "weyl1d/error.hpp"
#include "weyl1d/geometry.hpp"

using namespace weyl1d;

namespace {

constexpr double kPi = std::numbers::pi;

ModelSpace flat(double c = 1.0) { return make_space(Interval{kPi}, DensitySpec{ConstantDensity{c}, {-1.0, 2.0}}); }

ModelSpace sin_power(double p) {
  return make_space(Interval{kPi}, DensitySpec{SinPower{p}, {-p, p + 1.0}});
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

}  // namespace

TEST(CurvatureDimension, RejectsNAtMostOne) {
  EXPECT_EQ(code_of([] { CurvatureDimension(0.0, 1.0); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { CurvatureDimension(0.0, 0.5); }), ErrorCode::InvalidParameter);
  const CurvatureDimension cd(-0.25, 2.5);
  EXPECT_EQ(cd.K, -0.25);
  EXPECT_EQ(cd.N, 2.5);
}

TEST(MakeSpace, ProbabilityConstantHasUnitMass) {
  const auto s = make_space(Interval{kPi}, DensitySpec{ConstantDensity{1.0 / kPi}, {-1.0, 2.0}});
  EXPECT_NEAR(s.total_mass(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.hausdorff_length(), kPi);
}

TEST(MakeSpace, SineMassIsTwo) {
  EXPECT_NEAR(sin_power(1.0).total_mass(), 2.0, 1e-13);
}

TEST(MakeSpace, CircleLengthIsCircumference) {
  const auto s = make_space(Circle{1.5}, DensitySpec{ConstantDensity{1.0}, {-1.0, 2.0}});
  EXPECT_DOUBLE_EQ(s.hausdorff_length(), 3.0 * kPi);
  EXPECT_DOUBLE_EQ(s.diameter(), 1.5 * kPi);
  EXPECT_TRUE(s.periodic());
}

TEST(MakeSpace, SampledInteriorZeroRejected) {
  SampledDensity d{{0.0, 1.0, 2.0, kPi}, {1.0, 0.0, 1.0, 1.0}};
  EXPECT_EQ(code_of([&] { make_space(Interval{kPi}, DensitySpec{d, {-1.0, 2.0}}); }), ErrorCode::InteriorZeroDensity);
}

TEST(MakeSpace, SampledEndpointZeroAccepted) {
  SampledDensity d{{0.0, 1.0, 2.0, kPi}, {0.0, 1.0, 1.0, 0.0}};
  const auto s = make_space(Interval{kPi}, DensitySpec{d, {-1.0, 2.0}});
  EXPECT_TRUE(s.vanishes_at_start());
  EXPECT_TRUE(s.vanishes_at_end());
}

TEST(MakeSpace, SinPowerOnCircleIsDomainMismatch) {
  EXPECT_EQ(code_of([] { make_space(Circle{1.0}, DensitySpec{SinPower{1.0}, {-1.0, 2.0}}); }),
            ErrorCode::DomainMismatch);
  EXPECT_EQ(code_of([] { make_space(Interval{2.0}, DensitySpec{SinPower{1.0}, {-1.0, 2.0}}); }),
            ErrorCode::DomainMismatch);
}

TEST(MakeSpace, SampledGridMustCoverDomain) {
  SampledDensity d{{0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}};
  EXPECT_EQ(code_of([&] { make_space(Interval{kPi}, DensitySpec{d, {-1.0, 2.0}}); }), ErrorCode::DomainMismatch);
}

TEST(MakeSpace, ValidateReportsConvexityWitness) {
  // h = exp(x^2) makes -log h = -x^2 strictly concave.
  const DensitySpec spec{ExpNegF{FunctionSpec::polynomial({0.0, 0.0, -1.0})}, {0.0, 2.0}};
  try {
    make_space(Interval{2.0}, spec, true);
    FAIL() << "expected ConvexityViolation";
  } catch (const ConvexityViolationError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConvexityViolation);
    EXPECT_FALSE(e.report().passed);
    ASSERT_TRUE(e.report().witness.has_value());
    EXPECT_LT(e.report().witness->y0, e.report().witness->y1);
  }
}

TEST(MakeSpace, ValidateAcceptsSinPower) {
  EXPECT_NO_THROW(make_space(Interval{kPi}, DensitySpec{SinPower{2.0}, {-2.0, 3.0}}, true));
}

TEST(EvalDensity, Examples) {
  EXPECT_EQ(eval_density(flat(2.0), 0.3), 2.0);
  EXPECT_NEAR(eval_density(sin_power(1.0), kPi / 2), 1.0, 1e-15);
  EXPECT_NEAR(eval_density(sin_power(3.0), kPi / 6), 0.125, 1e-15);
  EXPECT_EQ(eval_density(sin_power(2.0), 0.0), 0.0);
  EXPECT_EQ(eval_density(sin_power(2.0), kPi), 0.0);
}

TEST(EvalDensity, OutOfDomain) {
  EXPECT_EQ(code_of([] { eval_density(flat(), -0.1); }), ErrorCode::OutOfDomain);
  EXPECT_EQ(code_of([] { eval_density(flat(), 3.2); }), ErrorCode::OutOfDomain);
  const auto c = make_space(Circle{1.0}, DensitySpec{ConstantDensity{1.0}, {-1.0, 2.0}});
  EXPECT_EQ(code_of([&] { eval_density(c, 2.0 * kPi); }), ErrorCode::OutOfDomain);
}

TEST(Distance, Examples) {
  EXPECT_NEAR(distance(flat(), 0.2, 0.7), 0.5, 1e-15);
  const auto c = make_space(Circle{1.0}, DensitySpec{ConstantDensity{1.0}, {-1.0, 2.0}});
  EXPECT_NEAR(distance(c, 0.1, 6.2), oracle::kCircleDistance, 1e-14);
  EXPECT_EQ(distance(c, 1.3, 1.3), 0.0);
  EXPECT_EQ(distance(flat(), 2.0, 2.0), 0.0);
}

TEST(Distance, IsAMetricOnRandomTriples) {
  const auto c = make_space(Circle{0.7}, DensitySpec{ConstantDensity{1.0}, {-1.0, 2.0}});
  const auto i = flat();
  std::mt19937_64 rng(7);
  for (const ModelSpace* s : {&c, &i}) {
    std::uniform_real_distribution<double> u(0.0, std::nextafter(s->domain_length(), 0.0));
    for (int k = 0; k < 2000; ++k) {
      const double x = u(rng), y = u(rng), z = u(rng);
      const double dxy = distance(*s, x, y);
      EXPECT_GE(dxy, 0.0);
      EXPECT_EQ(dxy, distance(*s, y, x));
      EXPECT_LE(dxy, distance(*s, x, z) + distance(*s, z, y) + 1e-14);
      EXPECT_LE(dxy, s->diameter() + 1e-14);
    }
  }
}

TEST(SampledDensity, ReproducesSinPowerOffGrid) {
  const double p = 2.0;
  const auto exact = sin_power(p);
  const std::size_t n = 10000;
  SampledDensity d;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = kPi * static_cast<double>(i) / (n - 1);
    d.grid.push_back(x);
    d.values.push_back(std::pow(std::sin(x), p));
  }
  d.grid.back() = kPi;
  d.values.back() = 0.0;
  const auto sampled = make_space(Interval{kPi}, DensitySpec{d, {-2.0, 3.0}});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.25, kPi - 0.25);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng);
    const double a = eval_density(exact, x);
    EXPECT_NEAR(eval_density(sampled, x) / a, 1.0, 1e-6) << "x=" << x;
  }
}

TEST(SampledDensity, MassMatchesClosedForm) {
  const std::size_t n = 2001;
  SampledDensity d;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = kPi * static_cast<double>(i) / (n - 1);
    d.grid.push_back(x);
    d.values.push_back(std::exp(-x));
  }
  d.grid.back() = kPi;
  // Log-linear interpolation of an exponential is exact.
  const auto s = make_space(Interval{kPi}, DensitySpec{d, {0.0, 2.0}});
  EXPECT_NEAR(s.total_mass(), 1.0 - std::exp(-kPi), 1e-13);
  EXPECT_NEAR(s.mass_between(0.5, 1.7), std::exp(-0.5) - std::exp(-1.7), 1e-13);
}

TEST(Scaling, MassScalesExactly) {
  for (double b : {0.1, 3.0, 1e5}) {
    for (const auto& spec : {DensitySpec{SinPower{2.0}, {-2.0, 3.0}}, DensitySpec{ConstantDensity{0.5}, {-1.0, 2.0}}}) {
      const auto s0 = make_space(Interval{kPi}, spec);
      const auto s1 = make_space(Interval{kPi}, scale_measure(spec, b));
      EXPECT_NEAR(s1.total_mass() / s0.total_mass(), b, 1e-14 * b);
    }
  }
}

TEST(Scaling, DilationScalesLengthAndMass) {
  const DensitySpec spec{SinPower{2.0}, {-2.0, 3.0}};
  const auto s0 = make_space(Interval{kPi}, spec);
  const auto s1 = make_space(dilate(SpaceKind{Interval{kPi}}, 2.5), dilate(spec, 2.5));
  EXPECT_NEAR(s1.hausdorff_length(), 2.5 * kPi, 1e-14);
  EXPECT_NEAR(s1.total_mass(), 2.5 * s0.total_mass(), 1e-12);
  EXPECT_NEAR(eval_density(s1, 2.5), eval_density(s0, 1.0), 1e-14);
}

TEST(Fingerprint, DistinguishesSpaces) {
  EXPECT_EQ(flat().fingerprint(), flat().fingerprint());
  EXPECT_NE(flat().fingerprint(), flat(2.0).fingerprint());
  EXPECT_NE(sin_power(1.0).fingerprint(), sin_power(2.0).fingerprint());
}

TEST(ExpNegF, CirclePeriodicityChecked) {
  // f(x) = x is not periodic on the circle.
  EXPECT_EQ(code_of([] {
              make_space(Circle{1.0}, DensitySpec{ExpNegF{FunctionSpec::polynomial({0.0, 1.0})}, {-1.0, 2.0}});
            }),
            ErrorCode::DomainMismatch);
}
