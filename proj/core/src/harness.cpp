#include "weyl1d/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "weyl1d/error.hpp"

namespace weyl1d {

namespace {

constexpr double kPi = std::numbers::pi;

// Atoms below e^{-40} of the first term are dropped; the Laplace transform
// of a truncated atom list needs t * known_up_to beyond this.
constexpr double kLaplaceCutoff = 40.0;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double slow_factor(SlowVariation slow, double a) { return slow == SlowVariation::Log ? std::log(a) : 1.0; }

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0 && hi > 0.0) || points < 2) {
    fail(ErrorCode::InvalidParameter, "geometric_grid needs positive endpoints and at least 2 points");
  }
  std::vector<double> g(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

double weyl_constant(const Spectrum& spec) { return spec.hausdorff_length() / kPi; }

std::vector<RatioPoint> weyl_ratio_curve(const Spectrum& spec, std::span<const double> lambdas) {
  std::vector<RatioPoint> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) {
    if (!(l > 0.0)) fail(ErrorCode::InvalidParameter, "weyl_ratio_curve needs lambda > 0");
    out.push_back({l, static_cast<double>(counting_function(spec, l)) / std::sqrt(l)});
  }
  return out;
}

WeylTailCheck weyl_tail_check(const Spectrum& spec, double tolerance, std::size_t points) {
  WeylTailCheck out;
  out.lambda_hi = spec.trusted_limit();
  out.lambda_lo = 0.1 * out.lambda_hi;
  if (!(out.lambda_lo > 0.0)) fail(ErrorCode::InsufficientSpectrum, "spectrum has no positive trusted range");
  out.target = weyl_constant(spec);
  const auto grid = geometric_grid(out.lambda_lo, out.lambda_hi, points);
  out.curve = weyl_ratio_curve(spec, grid);
  for (const RatioPoint& p : out.curve) {
    out.max_relative_error = std::max(out.max_relative_error, std::abs(p.ratio / out.target - 1.0));
  }
  out.measured = out.curve.back().ratio;
  out.ok = out.max_relative_error <= tolerance;
  return out;
}

HeatTraceLimit heat_trace_limit(const Spectrum& spec, double k, std::span<const double> t_grid, double tolerance,
                                bool tail_model) {
  if (!(k > 0.0)) fail(ErrorCode::InvalidParameter, "heat_trace_limit needs k > 0");
  if (t_grid.empty()) fail(ErrorCode::InvalidParameter, "heat_trace_limit needs a t grid");
  HeatTraceLimit out;
  out.lower_bound = spec.hausdorff_length() / std::pow(4.0 * kPi, 0.5 * k);
  out.liminf_estimate = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    const double v = std::pow(t, 0.5 * k) * heat_trace(spec, t, tail_model);
    out.t.push_back(t);
    out.scaled_trace.push_back(v);
    if (v < out.liminf_estimate) {
      out.liminf_estimate = v;
      out.argmin_t = t;
    }
  }
  out.ok = out.liminf_estimate >= out.lower_bound * (1.0 - tolerance);
  return out;
}

double cumulative(const SyntheticMeasure& nu, double a) {
  if (!(a >= 0.0)) fail(ErrorCode::InvalidParameter, "cumulative needs a >= 0");
  if (std::holds_alternative<LebesgueMeasure>(nu)) return a;
  const auto& m = std::get<AtomicMeasure>(nu);
  if (a > m.known_up_to) {
    fail(ErrorCode::BeyondResolvedRange, "a = " + std::to_string(a) + " beyond the known atoms");
  }
  return static_cast<double>(std::upper_bound(m.atoms.begin(), m.atoms.end(), a) - m.atoms.begin());
}

double laplace_transform(const SyntheticMeasure& nu, double t) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidParameter, "laplace_transform needs t > 0");
  if (std::holds_alternative<LebesgueMeasure>(nu)) return 1.0 / t;
  const auto& m = std::get<AtomicMeasure>(nu);
  if (t * m.known_up_to < kLaplaceCutoff) {
    fail(ErrorCode::InvalidParameter, "t = " + std::to_string(t) + " needs atoms beyond " +
                                          std::to_string(kLaplaceCutoff / t));
  }
  double sum = 0.0;
  for (auto it = m.atoms.rbegin(); it != m.atoms.rend(); ++it) {
    if (*it <= m.known_up_to) sum += std::exp(-t * *it);
  }
  return sum;
}

AbelianResult abelian_check(const SyntheticMeasure& nu, double gamma, double C, std::span<const double> a_grid,
                            std::span<const double> t_grid, const AbelianOptions& options) {
  if (!(gamma >= 0.0) || !(C >= 0.0)) fail(ErrorCode::InvalidParameter, "abelian_check needs gamma, C >= 0");
  if (a_grid.empty() || t_grid.empty()) fail(ErrorCode::InvalidParameter, "abelian_check needs both grids");
  if (!std::is_sorted(a_grid.begin(), a_grid.end()) || !std::is_sorted(t_grid.rbegin(), t_grid.rend())) {
    fail(ErrorCode::InvalidParameter, "a_grid must increase and t_grid decrease");
  }
  const bool log = options.slow == SlowVariation::Log;
  AbelianResult out;
  for (double a : a_grid) {
    if (log && !(a > 1.0)) fail(ErrorCode::InvalidParameter, "log-corrected a grid must exceed 1");
    out.a_ratios.push_back(cumulative(nu, a) / (std::pow(a, gamma) * slow_factor(options.slow, a)));
  }
  const double drift = C > 0.0 ? std::abs(out.a_ratios.back() / C - 1.0) : std::abs(out.a_ratios.back());
  if (drift > options.a_tolerance) {
    fail(ErrorCode::HypothesisNotMet, "nu([0,a]) / a^gamma ends at " + std::to_string(out.a_ratios.back()) +
                                          ", not near C = " + std::to_string(C));
  }

  const double shift = log ? boost::math::digamma(gamma + 1.0) : 0.0;
  for (double t : t_grid) {
    double v = std::pow(t, gamma) * laplace_transform(nu, t);
    if (log) {
      const double norm = std::log(1.0 / t) + shift;
      if (!(norm > 0.0)) fail(ErrorCode::InvalidParameter, "t too large for the log-corrected normaliser");
      v /= norm;
    }
    out.t_values.push_back(v);
  }
  out.rhs = C * std::tgamma(gamma + 1.0);
  out.lhs_limit = out.t_values.back();
  out.relative_error = out.rhs > 0.0 ? std::abs(out.lhs_limit - out.rhs) / out.rhs : std::abs(out.lhs_limit);
  out.ok = out.relative_error <= options.tolerance;
  return out;
}

AtomicMeasure square_atoms(std::size_t count) {
  if (count < 2) fail(ErrorCode::InvalidParameter, "square_atoms needs count >= 2");
  AtomicMeasure m;
  m.atoms.resize(count);
  for (std::size_t k = 0; k < count; ++k) m.atoms[k] = static_cast<double>(k) * static_cast<double>(k);
  m.known_up_to = m.atoms.back();
  return m;
}

AtomicMeasure lambda_log_lambda_atoms(std::size_t count, double c) {
  if (count < 1 || !(c > 0.0)) fail(ErrorCode::InvalidParameter, "lambda_log_lambda_atoms needs count >= 1, c > 0");
  AtomicMeasure m;
  m.atoms.reserve(count + 1);
  m.atoms.push_back(0.0);
  double lo = 1.0;
  for (std::size_t i = 1; i <= count; ++i) {
    const double target = static_cast<double>(i) / c;
    double a = lo;
    double b = std::max(2.0 * lo, 2.0);
    while (b * std::log(b) < target) b *= 2.0;
    for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
      const double mid = 0.5 * (a + b);
      (mid * std::log(mid) < target ? a : b) = mid;
    }
    m.atoms.push_back(b);
    lo = b;
  }
  m.known_up_to = m.atoms.back();
  return m;
}

AtomicMeasure atoms_from_spectrum(const Spectrum& spec) {
  AtomicMeasure m;
  m.atoms.assign(spec.eigenvalues().begin(), spec.eigenvalues().end());
  m.known_up_to = spec.trusted_limit();
  return m;
}

Spectrum spectrum_from_atoms(const AtomicMeasure& atoms, double hausdorff_length) {
  std::vector<double> values;
  for (double a : atoms.atoms) {
    if (a <= atoms.known_up_to) values.push_back(a);
  }
  return Spectrum::synthetic(std::move(values), hausdorff_length, atoms.known_up_to);
}

Spectrum linear_spectrum(std::size_t count) {
  if (count < 2) fail(ErrorCode::InvalidParameter, "linear_spectrum needs count >= 2");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = static_cast<double>(i);
  return Spectrum::synthetic(std::move(values), 0.0, static_cast<double>(count - 1));
}

DimensionVerdict classify_dimension(const Spectrum& spec, const ClassifierOptions& options) {
  if (options.points < 8) fail(ErrorCode::InvalidParameter, "classifier needs at least 8 points");
  const auto ev = spec.eigenvalues();
  const double hi = spec.trusted_limit();
  const auto nonzero = static_cast<std::size_t>(
      std::count_if(ev.begin(), ev.end(), [hi](double l) { return l > 1e-10 * hi; }));
  if (nonzero < 50) {
    fail(ErrorCode::InsufficientSpectrum,
         "classifier needs 50 nonzero resolved eigenvalues, got " + std::to_string(nonzero));
  }
  const double lambda1 = *std::find_if(ev.begin(), ev.end(), [hi](double l) { return l > 1e-10 * hi; });
  auto N = [&spec](double l) { return static_cast<double>(counting_function(spec, l)); };

  DimensionVerdict out;
  AsymptoticsFit& fit = out.fit;
  fit.lambda_hi = hi;
  fit.lambda_lo = 0.1 * hi;
  const auto grid = geometric_grid(fit.lambda_lo, fit.lambda_hi, options.points);
  std::vector<double> fx;
  std::vector<double> fy;
  for (std::size_t i = 0; i < grid.size(); i += 2) {
    fx.push_back(std::log(grid[i]));
    fy.push_back(std::log(N(grid[i])));
  }
  fit.exponent = least_squares(fx, fy).slope;
  fit.constant = N(hi) / std::pow(hi, fit.exponent);
  for (std::size_t i = 1; i < grid.size(); i += 2) {
    const double n = N(grid[i]);
    fit.residual = std::max(fit.residual, std::abs(n - fit.constant * std::pow(grid[i], fit.exponent)) / n);
  }

  if (fit.lambda_lo > 1.0) {
    double qmin = std::numeric_limits<double>::infinity();
    double qmax = 0.0;
    double qsum = 0.0;
    for (double l : grid) {
      const double q = N(l) / (l * std::log(l));
      qmin = std::min(qmin, q);
      qmax = std::max(qmax, q);
      qsum += q;
    }
    const double mean = qsum / static_cast<double>(grid.size());
    fit.log_ratio_spread = (qmax - qmin) / mean;
    fit.log_correction_detected = mean > 0.0 && fit.log_ratio_spread <= options.log_tolerance;
  } else {
    fit.log_ratio_spread = std::numeric_limits<double>::infinity();
  }

  const double alo = std::max(lambda1, 1e-3 * hi);
  const auto agrid = geometric_grid(alo, hi, options.points);
  bool all_decay = true;
  for (double alpha : options.alpha_grid) {
    if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::InvalidParameter, "alpha must lie in (0, 1]");
    std::vector<double> x;
    std::vector<double> y;
    for (double l : agrid) {
      x.push_back(std::log(l));
      y.push_back(std::log(N(l)) - 0.5 * (1.0 + alpha) * std::log(l));
    }
    AlphaDecay d;
    d.alpha = alpha;
    d.slope = least_squares(x, y).slope;
    d.decay_factor = std::exp(-d.slope * std::log(hi / alo));
    d.ok = d.slope < 0.0 && d.decay_factor >= options.required_decay;
    all_decay = all_decay && d.ok;
    out.alphas.push_back(d);
  }
  out.is_one_dimensional = all_decay && std::abs(fit.exponent - 0.5) <= options.exponent_tolerance;
  return out;
}

HeatTraceConsistency heat_trace_consistency(const Spectrum& spec) {
  HeatTraceConsistency out;
  const double hi = spec.trusted_limit();
  if (!(hi > 0.0)) fail(ErrorCode::InsufficientSpectrum, "spectrum has no positive trusted range");
  out.t_star = 1.0 / hi;
  out.scaled_trace = std::sqrt(out.t_star) * heat_trace(spec, out.t_star, true);
  out.predicted = std::tgamma(1.5) * static_cast<double>(counting_function(spec, hi)) / std::sqrt(hi);
  out.relative_error = std::abs(out.scaled_trace / out.predicted - 1.0);
  return out;
}

}  // namespace weyl1d
