#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "weyl1d/geometry.hpp"

namespace weyl1d {

enum class Grading { Uniform, BoundaryGraded };

/// Piecewise-linear mesh. On intervals the nodes run from 0 to l inclusive;
/// on circles they lie in [0, L) and the last element wraps to the first node.
struct Discretization {
  std::vector<double> nodes;
  bool periodic = false;
  std::size_t quadrature_order = 8;
  Grading grading = Grading::Uniform;
  double strength = 1.5;

  std::size_t element_count() const noexcept { return periodic ? nodes.size() : nodes.size() - 1; }
  /// Width of element e (the wrapping element included on circles).
  double element_width(std::size_t e, double domain_length) const noexcept;
  double max_element_width(double domain_length) const noexcept;
  /// Stable hash of the nodes and element settings.
  std::uint64_t fingerprint() const noexcept;
};

/// Mesh with the requested number of elements. Grading is applied only
/// toward endpoints where the density vanishes, through the power map
/// s -> s^strength; elements whose mass falls below 1e-30 of the total are
/// merged into a neighbour.
Discretization make_discretization(const ModelSpace& space, std::size_t elements,
                                   Grading grading = Grading::BoundaryGraded, double strength = 1.5,
                                   std::size_t quadrature_order = 8);

/// Element moments of h against the local coordinate s in [0, 1]:
/// m0 = int h, m1 = int h s, m2 = int h s^2.
struct ElementMoments {
  std::vector<double> width;
  std::vector<double> m0;
  std::vector<double> m1;
  std::vector<double> m2;
};

struct Assembly {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> mass;
  ElementMoments moments;
};

/// Weighted P1 stiffness int u'v' h and consistent mass int uv h, natural
/// boundary conditions. Throws SingularMass for an element of zero measure.
Assembly assemble(const ModelSpace& space, const Discretization& disc);

class Spectrum {
 public:
  Spectrum(std::vector<double> computed, std::size_t resolved_count, double mesh_size,
           std::uint64_t space_fingerprint, double hausdorff_length, double resolution_threshold);

  /// Exact or externally supplied eigenvalues, all treated as resolved up to
  /// `trusted_limit`.
  static Spectrum synthetic(std::vector<double> eigenvalues, double hausdorff_length, double trusted_limit,
                            std::uint64_t fingerprint = 0);

  /// Resolved eigenvalues only, ascending, with multiplicity.
  std::span<const double> eigenvalues() const noexcept { return {computed_.data(), resolved_count_}; }
  /// Everything the solver returned, including unresolved values.
  std::span<const double> computed() const noexcept { return computed_; }
  std::size_t resolved_count() const noexcept { return resolved_count_; }
  double mesh_size() const noexcept { return mesh_size_; }
  std::uint64_t space_fingerprint() const noexcept { return fingerprint_; }
  double hausdorff_length() const noexcept { return hausdorff_length_; }
  double resolution_threshold() const noexcept { return threshold_; }
  /// Largest lambda for which N(lambda) is known exactly: the resolution
  /// threshold when an unresolved value was computed beyond it, else the
  /// last resolved eigenvalue.
  double trusted_limit() const noexcept { return trusted_; }

 private:
  std::vector<double> computed_;
  std::size_t resolved_count_ = 0;
  double mesh_size_ = 0.0;
  std::uint64_t fingerprint_ = 0;
  double hausdorff_length_ = 0.0;
  double threshold_ = 0.0;
  double trusted_ = 0.0;
};

/// Safety factor in the resolution threshold (safety * (pi / h_max)^2).
inline constexpr double kResolutionSafety = 1.0 / 16.0;

/// Lowest `count_requested` eigenvalues of the weighted Neumann problem.
/// Banded generalized solve followed by shift-invert refinement of each
/// cluster, so small eigenvalues carry relative rather than absolute error.
Spectrum eigen_solve(const ModelSpace& space, const Discretization& disc, std::size_t count_requested);

/// N(lambda) = #{i : lambda_i <= lambda}, zero mode included.
/// Throws BeyondResolvedRange above trusted_limit().
std::size_t counting_function(const Spectrum& spec, double lambda);

/// Weyl-law estimate of sum_{lambda_i > trusted_limit} e^{-lambda_i t}:
/// (H^1 / pi) * sqrt(pi) / (2 sqrt(t)) * erfc(sqrt(t * trusted_limit)).
double weyl_tail(const Spectrum& spec, double t);

/// sum_i e^{-lambda_i t} over the resolved eigenvalues, plus weyl_tail when
/// `tail_model` is set. Without it, throws UnresolvedTail once the tail
/// estimate exceeds 1e-6 of the sum.
double heat_trace(const Spectrum& spec, double t, bool tail_model = false);

}  // namespace weyl1d
