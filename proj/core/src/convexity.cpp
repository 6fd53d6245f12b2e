#include "weyl1d/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace weyl1d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(sinh(u)) for u > 0 without overflow.
double log_sinh(double u) {
  if (u > 20.0) return u - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * u));
  return std::log(std::sinh(u));
}

struct Triple {
  double y0;
  double y1;
  double t;
  double d;
  double g0;
  double g1;
  double gt;
};

struct Partial {
  double worst = kInf;
  ConvexityWitness witness;
  bool has_witness = false;
  std::size_t tested = 0;
};

double term(double coefficient, double value) {
  // 0 * inf is taken as 0: a vanishing endpoint contributes nothing.
  if (value == 0.0) return 0.0;
  return coefficient * value;
}

void consider(Partial& acc, const Triple& tr, double K, double N) {
  const double rhs = term(sigma(1.0 - tr.t, K, N, tr.d), tr.g0) + term(sigma(tr.t, K, N, tr.d), tr.g1);
  const double margin = tr.gt - rhs;
  ++acc.tested;
  if (std::isnan(margin)) {
    fail(ErrorCode::EvaluationFailure,
         "convexity margin is NaN at y0=" + std::to_string(tr.y0) + " y1=" + std::to_string(tr.y1));
  }
  if (margin < acc.worst) {
    acc.worst = margin;
    acc.witness = {tr.y0, tr.y1, tr.t};
    acc.has_witness = true;
  }
}

double wrap(double x, double length) {
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  return r;
}

}  // namespace

double sigma(double t, double K, double N, double theta) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::InvalidParameter, "sigma: t outside [0,1]");
  if (!(theta >= 0.0)) fail(ErrorCode::InvalidParameter, "sigma: negative theta");
  if (!(N > 0.0)) fail(ErrorCode::InvalidParameter, "sigma: N must be positive");
  const double k_theta2 = K * theta * theta;
  if (k_theta2 >= N * std::numbers::pi * std::numbers::pi) return kInf;
  if (k_theta2 == 0.0) return t;
  if (k_theta2 > 0.0) {
    const double s = theta * std::sqrt(K / N);
    return std::sin(t * s) / std::sin(s);
  }
  const double s = theta * std::sqrt(-K / N);
  if (s > 20.0) return std::exp(log_sinh(t * s) - log_sinh(s));
  return std::sinh(t * s) / std::sinh(s);
}

ConvexityReport check_kn_convex(const std::function<double(double)>& f, const SpaceKind& kind,
                                double K, double N, const ConvexityOptions& options) {
  validate_kind(kind);
  if (options.grid_resolution < 3) {
    fail(ErrorCode::InvalidParameter, "check_kn_convex: grid_resolution must be >= 3");
  }
  if (!(N > 0.0)) fail(ErrorCode::InvalidParameter, "check_kn_convex: N must be positive");

  const bool circle = is_circle(kind);
  const double length = domain_length(kind);
  const std::size_t n = options.grid_resolution;
  const double step = circle ? length / static_cast<double>(n) : length / static_cast<double>(n - 1);

  auto g = [&](double x) {
    const double fx = f(x);
    if (std::isnan(fx)) {
      fail(ErrorCode::EvaluationFailure, "f(" + std::to_string(x) + ") is NaN");
    }
    return std::exp(-fx / N);
  };

  std::vector<double> base(n);
  std::vector<double> gbase(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = (!circle && i == n - 1) ? length : step * static_cast<double>(i);
    gbase[i] = g(base[i]);
    if (std::isfinite(gbase[i])) scale = std::max(scale, gbase[i]);
  }

  static constexpr double kT[] = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
  const std::size_t max_gap = n / 2;

  auto scan_rows = [&](std::size_t begin, std::size_t end, Partial& acc) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t gap = 1; gap <= max_gap; ++gap) {
        std::size_t j = i + gap;
        if (!circle && j >= n) break;
        if (circle) j %= n;
        const double d = step * static_cast<double>(gap);
        const double y0 = base[i];
        const double y1 = base[j];
        for (double t : kT) {
          const double forward = circle ? wrap(y0 + t * d, length) : y0 + t * (y1 - y0);
          consider(acc, {y0, y1, t, d, gbase[i], gbase[j], g(forward)}, K, N);
          if (circle && 2 * gap == n) {
            consider(acc, {y0, y1, t, d, gbase[i], gbase[j], g(wrap(y0 - t * d, length))}, K, N);
          }
        }
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  std::vector<Partial> partials(threads);
  if (threads == 1) {
    scan_rows(0, n, partials[0]);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          scan_rows(std::min(n, w * chunk), std::min(n, (w + 1) * chunk), partials[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    workers.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  Partial total;
  for (const Partial& p : partials) {
    total.tested += p.tested;
    if (p.has_witness && p.worst < total.worst) {
      total.worst = p.worst;
      total.witness = p.witness;
      total.has_witness = true;
    }
  }

  if (options.random_triples > 0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> coord(0.0, length);
    std::uniform_real_distribution<double> param(0.0, 1.0);
    for (std::size_t k = 0; k < options.random_triples; ++k) {
      double y0 = coord(rng);
      double y1 = coord(rng);
      const double t = param(rng);
      double d = std::abs(y1 - y0);
      double gt = 0.0;
      if (circle) {
        // Walk the shorter arc from y0 to y1.
        double forward = wrap(y1 - y0, length);
        if (forward <= 0.5 * length) {
          d = forward;
          gt = g(wrap(y0 + t * d, length));
        } else {
          d = length - forward;
          gt = g(wrap(y0 - t * d, length));
        }
      } else {
        gt = g(y0 + t * (y1 - y0));
      }
      const Triple tr{y0, y1, t, d, g(y0), g(y1), gt};
      Partial single;
      consider(single, tr, K, N);
      ++total.tested;
      if (single.worst < total.worst) {
        total.worst = single.worst;
        total.witness = single.witness;
        total.has_witness = true;
      }
    }
  }

  ConvexityReport report;
  report.tolerance = options.relative_tolerance * (1.0 + scale);
  report.worst_margin = total.worst;
  report.triples_tested = total.tested;
  if (total.has_witness) report.witness = total.witness;
  report.passed = report.worst_margin >= -report.tolerance;
  return report;
}

ConvexityReport check_kn_convex(const FunctionSpec& f, const SpaceKind& kind, double K, double N,
                                std::size_t grid_resolution) {
  ConvexityOptions options;
  options.grid_resolution = grid_resolution;
  return check_kn_convex(f.evaluate, kind, K, N, options);
}

ConvexityReport check_density_convexity(const ModelSpace& space, const ConvexityOptions& options) {
  const CurvatureDimension& cd = space.density_spec().cd;
  auto f = [&space](double x) { return -std::log(space.density(x)); };
  return check_kn_convex(f, space.kind(), cd.K, cd.N - 1.0, options);
}

SinhRatioBounds sinh_ratio_bounds(const std::function<double(double)>& h, double a, double b,
                                  double K, double N, double x0, double x1,
                                  double relative_tolerance) {
  if (!(K < 0.0)) fail(ErrorCode::InvalidParameter, "sinh_ratio_bounds: K must be negative");
  if (!(N > 1.0)) fail(ErrorCode::InvalidParameter, "sinh_ratio_bounds: N must exceed 1");
  if (!(a < x0 && x0 < x1 && x1 < b)) {
    fail(ErrorCode::InvalidParameter, "sinh_ratio_bounds: need a < x0 < x1 < b");
  }
  const double h0 = h(x0);
  if (h0 == 0.0) fail(ErrorCode::DivisionByZero, "sinh_ratio_bounds: h(x0) = 0");

  const double exponent = N - 1.0;
  const double c = std::sqrt(-K / exponent);
  SinhRatioBounds out;
  out.lower = std::exp(exponent * (log_sinh((b - x1) * c) - log_sinh((b - x0) * c)));
  out.upper = std::exp(exponent * (log_sinh((x1 - a) * c) - log_sinh((x0 - a) * c)));
  out.value = h(x1) / h0;
  out.ok = out.lower * (1.0 - relative_tolerance) <= out.value &&
           out.value <= out.upper * (1.0 + relative_tolerance);
  return out;
}

SinhRatioBounds sinh_ratio_bounds(const ModelSpace& space, double x0, double x1) {
  if (space.periodic()) {
    fail(ErrorCode::DomainMismatch, "sinh_ratio_bounds applies to interval spaces");
  }
  const CurvatureDimension& cd = space.density_spec().cd;
  auto h = [&space](double x) { return space.density(x); };
  return sinh_ratio_bounds(h, 0.0, space.domain_length(), cd.K, cd.N, x0, x1);
}

}  // namespace weyl1d
