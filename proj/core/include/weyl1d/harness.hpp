#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "weyl1d/spectral.hpp"

namespace weyl1d {

struct RatioPoint {
  double lambda = 0.0;
  double ratio = 0.0;
};

/// (lambda, N(lambda) / sqrt(lambda)) at each grid point.
std::vector<RatioPoint> weyl_ratio_curve(const Spectrum& spec, std::span<const double> lambdas);

/// H^1 / pi, the one-dimensional Weyl constant.
double weyl_constant(const Spectrum& spec);

/// `points` geometric values from lo to hi inclusive; decreasing if hi < lo.
std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

struct WeylTailCheck {
  std::vector<RatioPoint> curve;  // top resolved decade
  double target = 0.0;
  double measured = 0.0;            // ratio at the top of the window
  double max_relative_error = 0.0;  // over the whole window
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  bool ok = false;
};

/// Compares N(lambda)/sqrt(lambda) against H^1/pi on [hi/10, hi], hi the
/// trusted limit.
WeylTailCheck weyl_tail_check(const Spectrum& spec, double tolerance = 0.05, std::size_t points = 64);

struct HeatTraceLimit {
  double liminf_estimate = 0.0;
  double argmin_t = 0.0;
  double lower_bound = 0.0;
  bool ok = false;
  std::vector<double> t;
  std::vector<double> scaled_trace;  // t^{k/2} Z(t)
};

/// min over the grid of t^{k/2} Z(t) against H^1 / (4 pi)^{k/2}.
HeatTraceLimit heat_trace_limit(const Spectrum& spec, double k, std::span<const double> t_grid,
                                double tolerance = 0.02, bool tail_model = true);

/// Lebesgue measure on [0, inf).
struct LebesgueMeasure {};

/// Unit atoms at the listed points, known exactly up to `known_up_to`.
struct AtomicMeasure {
  std::vector<double> atoms;  // ascending
  double known_up_to = 0.0;
};

using SyntheticMeasure = std::variant<LebesgueMeasure, AtomicMeasure>;

/// Optional slowly varying factor L in nu([0, a]) ~ C a^gamma L(a).
enum class SlowVariation { None, Log };

struct AbelianOptions {
  SlowVariation slow = SlowVariation::None;
  double a_tolerance = 0.05;  // allowed drift of nu([0,a]) / (a^gamma L(a)) from C
  double tolerance = 0.01;    // at the smallest t
};

struct AbelianResult {
  std::vector<double> a_ratios;  // nu([0,a]) / (a^gamma L(a))
  std::vector<double> t_values;  // t^gamma Laplace(t) / L(1/t)-normaliser
  double lhs_limit = 0.0;        // value at the smallest t
  double rhs = 0.0;              // C Gamma(gamma + 1)
  double relative_error = 0.0;
  bool ok = false;
};

/// nu([0, a]) for a >= 0.
double cumulative(const SyntheticMeasure& nu, double a);
/// Integral of e^{-tx} against nu.
double laplace_transform(const SyntheticMeasure& nu, double t);

/// Checks the a-side hypothesis on a_grid (HypothesisNotMet when the ratio at
/// the largest a is not within a_tolerance of C) and then the Laplace side:
/// t^gamma int e^{-tx} dnu -> C Gamma(gamma+1). With SlowVariation::Log the
/// Laplace side is divided by log(1/t) + digamma(gamma + 1) and the a side
/// by log a.
AbelianResult abelian_check(const SyntheticMeasure& nu, double gamma, double C, std::span<const double> a_grid,
                            std::span<const double> t_grid, const AbelianOptions& options = {});

/// Atoms at k^2, k = 0 .. count-1.
AtomicMeasure square_atoms(std::size_t count);
/// Atoms a_i solving c a log a = i for i = 1 .. count, plus one at 0.
AtomicMeasure lambda_log_lambda_atoms(std::size_t count, double c);
/// The resolved eigenvalues as atoms.
AtomicMeasure atoms_from_spectrum(const Spectrum& spec);
/// A spectrum whose eigenvalues are the atoms (used by the classifier).
Spectrum spectrum_from_atoms(const AtomicMeasure& atoms, double hausdorff_length = 0.0);
/// lambda_i = i for i = 0 .. count-1, so N(lambda) = floor(lambda) + 1.
Spectrum linear_spectrum(std::size_t count);

struct AlphaDecay {
  double alpha = 0.0;
  double slope = 0.0;         // d log ratio / d log lambda
  double decay_factor = 0.0;  // ratio(lo) / ratio(hi) along the fit
  bool ok = false;
};

struct AsymptoticsFit {
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // held-out points
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  bool log_correction_detected = false;
  double log_ratio_spread = 0.0;  // relative spread of N / (lambda log lambda)
};

struct DimensionVerdict {
  bool is_one_dimensional = false;
  AsymptoticsFit fit;
  std::vector<AlphaDecay> alphas;
};

struct ClassifierOptions {
  std::vector<double> alpha_grid{0.25, 0.5, 0.75, 1.0};
  double exponent_tolerance = 0.05;
  double required_decay = 2.0;
  double log_tolerance = 0.05;
  std::size_t points = 64;
};

/// Log-log fit of N(lambda) over the top trusted decade plus the alpha decay
/// tests and the lambda log lambda discriminator. Needs 50 nonzero
/// eigenvalues (InsufficientSpectrum otherwise).
DimensionVerdict classify_dimension(const Spectrum& spec, const ClassifierOptions& options = {});

struct HeatTraceConsistency {
  double t_star = 0.0;
  double scaled_trace = 0.0;  // sqrt(t*) Z(t*)
  double predicted = 0.0;     // Gamma(3/2) N(hi)/sqrt(hi)
  double relative_error = 0.0;
};

/// Heat trace at t* = 1/lambda_hi against Gamma(3/2) times the tail Weyl ratio.
HeatTraceConsistency heat_trace_consistency(const Spectrum& spec);

}  // namespace weyl1d
