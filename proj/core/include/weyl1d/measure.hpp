#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "weyl1d/geometry.hpp"

namespace weyl1d {

/// m(B_r(x)) for the open ball of radius r, truncated at interval ends and
/// wrapped on circles. On circles 2r must be below the circumference.
double ball_measure(const ModelSpace& space, double x, double r);

/// r / m(B_r(x)).
double ratio_integrand(const ModelSpace& space, double x, double r);

/// Pointwise r -> 0 limit of the ratio integrand: 1/(2h(x)) at interior
/// points and on circles, 1/h(x) at an interval end.
double ratio_integrand_limit(const ModelSpace& space, double x);

struct RatioIntegralOptions {
  std::size_t quadrature_points = 20;
  double relative_tolerance = 1e-11;
  std::size_t max_panels = 1u << 16;
};

/// Integral over the space of r / m(B_r(x)) against dm. The integrand is
/// regrouped as r h(x) / m(B_r(x)) dx, so vanishing densities never produce
/// 0/0. Throws QuadratureNonConvergence when the panel budget runs out.
double ratio_integral(const ModelSpace& space, double r, const RatioIntegralOptions& options);
double ratio_integral(const ModelSpace& space, double r, std::size_t quadrature_points = 20);

struct RatioProfile {
  std::vector<double> radii;      // strictly decreasing
  std::vector<double> integrals;  // ratio_integral at each radius
  /// Linear-in-r extrapolations to r = 0 from consecutive radius pairs;
  /// entry i uses radii i and i+1.
  std::vector<double> richardson;
  double extrapolated_limit = 0.0;
  double extrapolation_error = 0.0;
  /// H^1(X)/2, the integral of the pointwise limit against dm.
  double target = 0.0;
};

/// Evaluates ratio_integral on a geometric grid from r_max down to r_min
/// (steps points) and extrapolates to r = 0.
RatioProfile ratio_profile(const ModelSpace& space, double r_max, double r_min, std::size_t steps,
                           unsigned threads = 1, std::size_t quadrature_points = 20);

/// Default grid: 0.1 diam down to 1e-4 diam in 11 near-halving steps.
RatioProfile ratio_profile(const ModelSpace& space, unsigned threads = 1);

struct DominationCheck {
  double sup_observed = 0.0;
  double bound = 0.0;
  bool ok = false;
  double argmax_x = 0.0;
  double argmax_r = 0.0;
};

/// sup over the (x, r) grid of r h(x) / m(B_r(x)) against N 8^{N-1}.
DominationCheck domination_bound_check(const ModelSpace& space, double N, std::span<const double> r_grid,
                                       std::span<const double> x_grid, unsigned threads = 1);

struct DominationGrid {
  std::vector<double> x;
  std::vector<double> r;
};

/// nx equispaced coordinates covering the domain and nr geometric radii from
/// 1e-4 diam to diam / 2.
DominationGrid default_domination_grid(const ModelSpace& space, std::size_t nx = 200, std::size_t nr = 20);

}  // namespace weyl1d
