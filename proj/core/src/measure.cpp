#include "weyl1d/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "weyl1d/error.hpp"
#include "weyl1d/parallel.hpp"
#include "weyl1d/quadrature.hpp"

namespace weyl1d {

namespace {

void check_radius(const ModelSpace& space, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    fail(ErrorCode::InvalidParameter, "ball radius must be positive, got " + std::to_string(r));
  }
  if (space.periodic() && !(2.0 * r < space.domain_length())) {
    fail(ErrorCode::InvalidParameter, "ball radius " + std::to_string(r) + " wraps the whole circle");
  }
}

double ball_unchecked(const ModelSpace& space, double x, double r) {
  const double L = space.domain_length();
  double lo = x - r;
  double hi = x + r;
  if (!space.periodic()) return space.mass_between(std::max(lo, 0.0), std::min(hi, L));
  if (lo < 0.0) return space.mass_between(lo + L, L) + space.mass_between(0.0, std::min(hi, L));
  if (hi > L) return space.mass_between(lo, L) + space.mass_between(0.0, hi - L);
  return space.mass_between(lo, hi);
}

// r h(x) / m(B_r(x)), finite wherever h vanishes.
double weighted_ratio(const ModelSpace& space, double x, double r) {
  const double h = space.density(x);
  if (h == 0.0) return 0.0;
  const double m = ball_unchecked(space, x, r);
  if (!(m > 0.0)) fail(ErrorCode::DivisionByZero, "ball of zero measure at x=" + std::to_string(x));
  return r * h / m;
}

std::vector<double> initial_edges(const ModelSpace& space, double r) {
  const double L = space.domain_length();
  std::vector<double> edges{0.0, L};
  auto add = [&](double e) {
    if (space.periodic()) {
      e = std::fmod(e, L);
      if (e < 0.0) e += L;
    }
    if (e > 0.0 && e < L) edges.push_back(e);
  };
  if (space.periodic()) {
    for (int k = 1; k < 16; ++k) add(L * k / 16.0);
  } else {
    // Geometric panels from each end, where the ball starts to be truncated.
    for (double w = r; w < 0.5 * L; w *= 2.0) {
      add(w);
      add(L - w);
    }
    add(0.5 * L);
    for (int k = 1; k < 8; ++k) add(L * k / 8.0);
  }
  for (double b : space.breakpoints()) {
    add(b);
    add(b - r);
    add(b + r);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [L](double a, double b) { return b - a <= 1e-15 * L; }),
              edges.end());
  edges.back() = L;
  return edges;
}

struct PanelIntegrator {
  const ModelSpace& space;
  double r;
  std::size_t n;
  std::size_t max_panels;
  double density_tol = 0.0;  // allowed error per unit length
  std::size_t panels = 0;

  double rule(double a, double b) const {
    return gauss_integrate([this](double x) { return weighted_ratio(space, x, r); }, a, b, n);
  }

  double refine(double a, double b, double coarse, int depth) {
    const double m = 0.5 * (a + b);
    const double left = rule(a, m);
    const double right = rule(m, b);
    const double fine = left + right;
    ++panels;
    if (std::abs(fine - coarse) <= density_tol * (b - a) || depth >= 60 || m <= a || m >= b) return fine;
    if (panels > max_panels) {
      fail(ErrorCode::QuadratureNonConvergence,
           "ratio integral at r=" + std::to_string(r) + " exceeded the panel budget");
    }
    return refine(a, m, left, depth + 1) + refine(m, b, right, depth + 1);
  }
};

}  // namespace

double ball_measure(const ModelSpace& space, double x, double r) {
  check_coordinate(space, x);
  check_radius(space, r);
  return ball_unchecked(space, x, r);
}

double ratio_integrand(const ModelSpace& space, double x, double r) {
  const double m = ball_measure(space, x, r);
  if (!(m > 0.0)) fail(ErrorCode::DivisionByZero, "ball of zero measure at x=" + std::to_string(x));
  return r / m;
}

double ratio_integrand_limit(const ModelSpace& space, double x) {
  const double h = eval_density(space, x);
  const bool end = !space.periodic() && (x == 0.0 || x == space.domain_length());
  if (h == 0.0) return std::numeric_limits<double>::infinity();
  return end ? 1.0 / h : 0.5 / h;
}

double ratio_integral(const ModelSpace& space, double r, const RatioIntegralOptions& options) {
  check_radius(space, r);
  if (options.quadrature_points == 0) fail(ErrorCode::InvalidParameter, "quadrature_points must be positive");
  const std::vector<double> edges = initial_edges(space, r);
  PanelIntegrator integ{space, r, options.quadrature_points, options.max_panels};

  std::vector<double> coarse(edges.size() - 1);
  double estimate = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    coarse[i] = integ.rule(edges[i], edges[i + 1]);
    estimate += coarse[i];
  }
  integ.density_tol = options.relative_tolerance * std::max(std::abs(estimate), 1e-300) / space.domain_length();

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += integ.refine(edges[i], edges[i + 1], coarse[i], 0);
  }
  if (!std::isfinite(total)) fail(ErrorCode::EvaluationFailure, "ratio integral is not finite");
  return total;
}

double ratio_integral(const ModelSpace& space, double r, std::size_t quadrature_points) {
  RatioIntegralOptions options;
  options.quadrature_points = quadrature_points;
  return ratio_integral(space, r, options);
}

RatioProfile ratio_profile(const ModelSpace& space, double r_max, double r_min, std::size_t steps,
                           unsigned threads, std::size_t quadrature_points) {
  if (steps < 3) fail(ErrorCode::InvalidParameter, "ratio_profile needs at least 3 radii");
  if (!(r_min > 0.0 && r_max > r_min)) fail(ErrorCode::InvalidParameter, "ratio_profile needs 0 < r_min < r_max");

  RatioProfile out;
  out.target = 0.5 * space.hausdorff_length();
  out.radii.resize(steps);
  const double ratio = std::pow(r_min / r_max, 1.0 / static_cast<double>(steps - 1));
  for (std::size_t i = 0; i < steps; ++i) {
    out.radii[i] = (i + 1 == steps) ? r_min : r_max * std::pow(ratio, static_cast<double>(i));
  }
  out.integrals.resize(steps);
  parallel_for(steps, threads,
               [&](std::size_t i) { out.integrals[i] = ratio_integral(space, out.radii[i], quadrature_points); });

  for (std::size_t i = 0; i + 1 < steps; ++i) {
    const double r0 = out.radii[i];
    const double r1 = out.radii[i + 1];
    out.richardson.push_back((r0 * out.integrals[i + 1] - r1 * out.integrals[i]) / (r0 - r1));
  }
  out.extrapolated_limit = out.richardson.back();
  out.extrapolation_error = std::abs(out.richardson.back() - out.richardson[out.richardson.size() - 2]);
  return out;
}

RatioProfile ratio_profile(const ModelSpace& space, unsigned threads) {
  const double d = space.diameter();
  return ratio_profile(space, 0.1 * d, 1e-4 * d, 11, threads);
}

DominationCheck domination_bound_check(const ModelSpace& space, double N, std::span<const double> r_grid,
                                       std::span<const double> x_grid, unsigned threads) {
  if (!(N > 1.0)) fail(ErrorCode::InvalidParameter, "domination bound needs N > 1");
  if (r_grid.empty() || x_grid.empty()) fail(ErrorCode::InvalidParameter, "domination grid is empty");
  for (double x : x_grid) check_coordinate(space, x);
  for (double r : r_grid) {
    if (!(r > 0.0)) fail(ErrorCode::InvalidParameter, "domination radii must be positive");
  }

  struct Best {
    double value = 0.0;
    double x = 0.0;
    double r = 0.0;
  };
  std::vector<Best> rows(x_grid.size());
  parallel_for(x_grid.size(), threads, [&](std::size_t i) {
    Best& best = rows[i];
    best.x = x_grid[i];
    for (double r : r_grid) {
      if (space.periodic() && !(2.0 * r < space.domain_length())) continue;
      const double v = weighted_ratio(space, x_grid[i], r);
      if (v > best.value) best = {v, x_grid[i], r};
    }
  });

  DominationCheck out;
  out.bound = N * std::pow(8.0, N - 1.0);
  for (const Best& b : rows) {
    if (b.value > out.sup_observed) {
      out.sup_observed = b.value;
      out.argmax_x = b.x;
      out.argmax_r = b.r;
    }
  }
  out.ok = out.sup_observed <= out.bound;
  return out;
}

DominationGrid default_domination_grid(const ModelSpace& space, std::size_t nx, std::size_t nr) {
  if (nx < 2 || nr < 2) fail(ErrorCode::InvalidParameter, "domination grid needs at least 2 points per axis");
  DominationGrid g;
  const double L = space.domain_length();
  const double d = space.diameter();
  g.x.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    g.x[i] = space.periodic() ? L * static_cast<double>(i) / static_cast<double>(nx)
                              : L * static_cast<double>(i) / static_cast<double>(nx - 1);
  }
  if (!space.periodic()) g.x.back() = L;
  g.r.resize(nr);
  const double r_lo = 1e-4 * d;
  const double r_hi = 0.5 * d;
  for (std::size_t j = 0; j < nr; ++j) {
    g.r[j] = r_lo * std::pow(r_hi / r_lo, static_cast<double>(j) / static_cast<double>(nr - 1));
  }
  return g;
}

}  // namespace weyl1d
