#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace weyl1d {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the n-point rule. Rules are computed once per n and cached; the
/// returned reference stays valid for the lifetime of the program.
const GaussRule& gauss_legendre(std::size_t n);

/// Fixed n-point Gauss-Legendre approximation of the integral over [a, b].
template <class F>
double gauss_integrate(const F& f, double a, double b, std::size_t n) {
  const GaussRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

/// Adaptive Gauss-Kronrod integration over [a, b]. Throws
/// QuadratureNonConvergence when the error estimate stays above
/// rel_tol * |integral|_1 + abs_tol once panels reach max_depth bisections.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 0.0,
                          unsigned max_depth = 48);

}  // namespace weyl1d
