#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace weyl1d {

/// Lower Ricci bound K and upper dimension bound N of a curvature-dimension
/// condition. Stored exactly as given; the constructor only rejects N <= 1.
struct CurvatureDimension {
  double K = 0.0;
  double N = 2.0;

  CurvatureDimension() = default;
  CurvatureDimension(double K_, double N_);
};

/// The segment [0, length].
struct Interval {
  double length = 0.0;
};

/// The circle of the given radius, coordinatised by arc length on
/// [0, 2*pi*radius) with arithmetic modulo the circumference.
struct Circle {
  double radius = 0.0;
};

using SpaceKind = std::variant<Interval, Circle>;

/// Length of the coordinate domain: the interval length or the circumference.
double domain_length(const SpaceKind& kind);
bool is_circle(const SpaceKind& kind) noexcept;
/// Throws InvalidParameter unless the length or radius is finite and positive.
void validate_kind(const SpaceKind& kind);

/// A named real function of the coordinate. The name and parameters identify
/// the function for fingerprinting and caching; `evaluate` does the work.
struct FunctionSpec {
  std::string name;
  std::vector<double> parameters;
  std::function<double(double)> evaluate;

  double operator()(double x) const { return evaluate(x); }

  /// f(x) = c0 + c1 x + c2 x^2 + ...
  static FunctionSpec polynomial(std::vector<double> coefficients);
  static FunctionSpec custom(std::string name, std::function<double(double)> fn,
                             std::vector<double> parameters = {});
};

struct ConstantDensity {
  double value = 1.0;
};

/// h = exp(-f).
struct ExpNegF {
  FunctionSpec f;
};

/// h(x) = sin(x / scale)^exponent on [0, pi * scale]. The exponent is N - 1
/// for the model space of dimension bound N.
struct SinPower {
  double exponent = 1.0;
  double scale = 1.0;
};

/// Samples of h on a strictly increasing grid covering the whole domain.
/// Between samples h is interpolated linearly in log h, or linearly in h on
/// segments touching a zero sample.
struct SampledDensity {
  std::vector<double> grid;
  std::vector<double> values;
};

using DensityFamily = std::variant<ConstantDensity, ExpNegF, SinPower, SampledDensity>;

struct DensitySpec {
  DensityFamily family;
  CurvatureDimension cd;
  /// Every value of the family is multiplied by this factor.
  double multiplier = 1.0;
  /// Rescale to a probability measure after construction.
  bool normalize = false;
};

/// The density b*h: same family, multiplier scaled by b.
DensitySpec scale_measure(DensitySpec density, double b);
/// The density x -> h(x / a) on the a-dilated domain.
DensitySpec dilate(DensitySpec density, double a);
SpaceKind dilate(const SpaceKind& kind, double a);

/// A one-dimensional model space: an interval or a circle carrying the
/// measure h * H^1. Immutable after construction.
class ModelSpace {
 public:
  const SpaceKind& kind() const noexcept { return kind_; }
  const DensitySpec& density_spec() const noexcept { return density_; }

  /// m(X) = integral of h over the domain.
  double total_mass() const noexcept { return total_mass_; }
  /// H^1(X): the interval length or the circumference.
  double hausdorff_length() const noexcept { return length_; }
  /// Coordinate domain length; equals hausdorff_length().
  double domain_length() const noexcept { return length_; }
  /// Largest distance between two points: l, or pi * r on a circle.
  double diameter() const noexcept { return periodic_ ? 0.5 * length_ : length_; }
  bool periodic() const noexcept { return periodic_; }

  /// Density at a coordinate already known to lie in the domain.
  double density(double x) const noexcept;
  /// Measure of the coordinate segment [a, b] with 0 <= a <= b <= domain_length().
  double mass_between(double a, double b) const;

  bool vanishes_at_start() const noexcept { return zero_start_; }
  bool vanishes_at_end() const noexcept { return zero_end_; }

  /// Coordinates where h may fail to be smooth (sample nodes), sorted,
  /// excluding the domain ends.
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }

  /// Stable 64-bit hash of the kind, density parameters and CD pair.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  friend ModelSpace make_space(SpaceKind kind, DensitySpec density, bool validate);

  ModelSpace() = default;
  double raw_density(double x) const noexcept;
  double raw_mass_between(double a, double b) const;
  double sampled_partial(std::size_t segment, double s0, double s1) const noexcept;

  SpaceKind kind_;
  DensitySpec density_;
  double length_ = 0.0;
  bool periodic_ = false;
  double scale_ = 1.0;
  double total_mass_ = 0.0;
  bool zero_start_ = false;
  bool zero_end_ = false;
  std::vector<double> breakpoints_;
  std::vector<double> cumulative_;
  std::uint64_t fingerprint_ = 0;
};

/// Builds and checks a model space. With `validate`, -log h is checked for
/// (K, N-1)-convexity on a sampling grid and a ConvexityViolationError
/// carrying the worst triple is thrown on failure.
ModelSpace make_space(SpaceKind kind, DensitySpec density, bool validate = false);

/// h(x); throws OutOfDomain for coordinates outside the space.
double eval_density(const ModelSpace& space, double x);

/// Geodesic distance: |x - y| on intervals, arc length on circles.
double distance(const ModelSpace& space, double x, double y);

/// Throws OutOfDomain unless x is a valid coordinate of the space.
void check_coordinate(const ModelSpace& space, double x);

}  // namespace weyl1d
