#include "weyl1d/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "weyl1d/error.hpp"

namespace weyl1d {

namespace {

GaussRule compute_rule(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidParameter, "Gauss rule needs at least one node");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_rule(n));
  return *slot;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, unsigned max_depth) {
  if (!(b > a)) return 0.0;
  struct Panel {
    double a, b, value, error, l1;
    unsigned depth;
  };
  // One GK31 pass on [lo, hi], mapped to [-1, 1] so the Kronrod error refers
  // to the same scale as the value.
  auto rule = [&f](double lo, double hi, unsigned depth) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double u) { return f(mid + half * u); }, -1.0, 1.0, 0, 0.0, &err, &l1);
    if (!std::isfinite(v)) {
      fail(ErrorCode::EvaluationFailure,
           "non-finite integrand on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return Panel{lo, hi, half * v, half * err, half * l1, depth};
  };
  auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };

  std::vector<Panel> heap{rule(a, b, 0)};
  double value = heap.front().value;
  double error = heap.front().error;
  double l1 = heap.front().l1;
  // Rounding floor: the Kronrod estimate cannot go below a few ulps of L1.
  auto allowed = [&] { return std::max(rel_tol * l1 + abs_tol, 64.0 * 2.2e-16 * l1); };
  const std::size_t max_panels = std::size_t{64} << std::min(max_depth, 16u);
  while (error > allowed() && heap.size() < max_panels) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Panel worst = heap.back();
    if (worst.depth >= max_depth) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), worse);
      break;
    }
    heap.pop_back();
    const double m = 0.5 * (worst.a + worst.b);
    for (const Panel& p : {rule(worst.a, m, worst.depth + 1), rule(m, worst.b, worst.depth + 1)}) {
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end(), worse);
    }
    value = error = l1 = 0.0;
    for (const Panel& p : heap) {
      value += p.value;
      error += p.error;
      l1 += p.l1;
    }
  }
  if (error > allowed()) {
    fail(ErrorCode::QuadratureNonConvergence,
         "adaptive quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
             "] stalled at error " + std::to_string(error));
  }
  return value;
}

}  // namespace weyl1d
