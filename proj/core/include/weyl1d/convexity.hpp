#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "weyl1d/error.hpp"
#include "weyl1d/geometry.hpp"

namespace weyl1d {

/// A sampled triple (y0, y1, t): endpoints of a geodesic and the interior
/// parameter at which the convexity inequality was tested.
struct ConvexityWitness {
  double y0 = 0.0;
  double y1 = 0.0;
  double t = 0.0;
};

struct ConvexityReport {
  bool passed = true;
  /// min over tested triples of lhs - rhs; +inf when nothing was tested.
  double worst_margin = 0.0;
  std::optional<ConvexityWitness> witness;
  double tolerance = 0.0;
  std::size_t triples_tested = 0;
};

class ConvexityViolationError : public Error {
 public:
  ConvexityViolationError(const std::string& message, ConvexityReport report)
      : Error(ErrorCode::ConvexityViolation, message), report_(std::move(report)) {}

  const ConvexityReport& report() const noexcept { return report_; }

 private:
  ConvexityReport report_;
};

/// Distortion coefficient sigma^{(t)}_{K,N}(theta). Returns +inf when
/// K theta^2 >= N pi^2. The positive-K branch uses sin(theta sqrt(K/N)) in the
/// denominator so that sigma^{(1)} = 1.
double sigma(double t, double K, double N, double theta);

struct ConvexityOptions {
  /// Equispaced base points; pairs with index gap <= resolution / 2 are tested
  /// at t = 1/8, ..., 7/8.
  std::size_t grid_resolution = 200;
  /// Extra uniformly random (y0, y1, t) triples drawn from `seed`.
  std::size_t random_triples = 0;
  std::uint64_t seed = 0;
  /// Relative slack; the absolute tolerance is this times (1 + max exp(-f/N)).
  double relative_tolerance = 1e-9;
  unsigned threads = 1;
};

/// Samples the (K, N)-convexity inequality
///   exp(-f(g_t)/N) >= sigma^{(1-t)}(d) exp(-f(y0)/N) + sigma^{(t)}(d) exp(-f(y1)/N)
/// along coordinate geodesics g of the given space kind. On circles both
/// arcs are tested when the points are antipodal. f may return +inf.
ConvexityReport check_kn_convex(const std::function<double(double)>& f, const SpaceKind& kind,
                                double K, double N, const ConvexityOptions& options = {});

ConvexityReport check_kn_convex(const FunctionSpec& f, const SpaceKind& kind, double K, double N,
                                std::size_t grid_resolution);

/// Checks that f = -log h of the space is (K, N-1)-convex, using the space's
/// own curvature-dimension pair.
ConvexityReport check_density_convexity(const ModelSpace& space,
                                        const ConvexityOptions& options = {});

struct SinhRatioBounds {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
  bool ok = false;
};

/// Two-sided control of h(x1)/h(x0) for a density whose -log is
/// (K, N-1)-convex on (a, b) with K < 0:
///   (sinh((b-x1)c)/sinh((b-x0)c))^{N-1} <= h(x1)/h(x0) <= (sinh((x1-a)c)/sinh((x0-a)c))^{N-1}
/// with c = sqrt(-K/(N-1)).
SinhRatioBounds sinh_ratio_bounds(const std::function<double(double)>& h, double a, double b,
                                  double K, double N, double x0, double x1,
                                  double relative_tolerance = 1e-10);

/// Same bounds on (0, l) for an interval space, using its CD pair.
SinhRatioBounds sinh_ratio_bounds(const ModelSpace& space, double x0, double x1);

}  // namespace weyl1d
