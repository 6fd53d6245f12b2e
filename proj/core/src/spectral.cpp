#include "weyl1d/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "hash.hpp"
#include "weyl1d/error.hpp"
#include "weyl1d/quadrature.hpp"

namespace weyl1d {

namespace {

constexpr double kPi = std::numbers::pi;

// Consecutive eigenvalue estimates closer than this (relative) are refined
// together as one invariant subspace.
constexpr double kClusterGap = 1e-6;
constexpr int kMaxRefineSteps = 10;

double power_grade(double s, double p, bool start, bool end) {
  if (start && end) {
    return s < 0.5 ? 0.5 * std::pow(2.0 * s, p) : 1.0 - 0.5 * std::pow(2.0 * (1.0 - s), p);
  }
  if (start) return std::pow(s, p);
  if (end) return 1.0 - std::pow(1.0 - s, p);
  return s;
}

ElementMoments element_moments(const ModelSpace& space, const Discretization& disc) {
  const double L = space.domain_length();
  const std::size_t ne = disc.element_count();
  const GaussRule& rule = gauss_legendre(disc.quadrature_order);
  const auto bps = space.breakpoints();
  ElementMoments mom;
  mom.width.resize(ne);
  mom.m0.assign(ne, 0.0);
  mom.m1.assign(ne, 0.0);
  mom.m2.assign(ne, 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    const double a = disc.nodes[e];
    const double w = disc.element_width(e, L);
    const double b = a + w;
    mom.width[e] = w;
    std::vector<double> cuts{a};
    for (auto it = std::upper_bound(bps.begin(), bps.end(), a); it != bps.end() && *it < b; ++it) {
      cuts.push_back(*it);
    }
    cuts.push_back(b);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double half = 0.5 * (cuts[c + 1] - cuts[c]);
      const double mid = 0.5 * (cuts[c + 1] + cuts[c]);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = mid + half * rule.nodes[q];
        const double hw = half * rule.weights[q] * space.density(std::min(x, std::nextafter(L, 0.0)));
        const double s = (x - a) / w;
        mom.m0[e] += hw;
        mom.m1[e] += hw * s;
        mom.m2[e] += hw * s * s;
      }
    }
  }
  return mom;
}

std::size_t next_node(std::size_t e, std::size_t n) { return e + 1 == n ? 0 : e + 1; }

// Shift-invert solves in band storage, in the node order that keeps the
// bandwidth at 1 (interval) or 2 (circle), with diagonal scaling D.
class BandedOperator {
 public:
  BandedOperator(const Assembly& as, bool periodic) : n_(static_cast<int>(as.mass.rows())) {
    kd_ = periodic ? 2 : 1;
    perm_.resize(n_);
    inv_.resize(n_);
    if (periodic) {
      int lo = 1;
      int hi = n_ - 1;
      perm_[0] = 0;
      for (int p = 1; p < n_; ++p) perm_[p] = (p % 2 == 1) ? lo++ : hi--;
    } else {
      for (int p = 0; p < n_; ++p) perm_[p] = p;
    }
    for (int p = 0; p < n_; ++p) inv_[perm_[p]] = p;
    d_.resize(n_);
    for (int i = 0; i < n_; ++i) d_[i] = 1.0 / std::sqrt(as.mass.coeff(i, i));
  }

  int size() const { return n_; }
  int bandwidth() const { return kd_; }
  int position(int node) const { return inv_[node]; }
  int node(int pos) const { return perm_[pos]; }
  double scale(int node) const { return d_[node]; }

  // Upper symmetric band storage of D A D for dsbgvx.
  std::vector<double> symmetric_band(const Eigen::SparseMatrix<double>& A) const {
    const int ld = kd_ + 1;
    std::vector<double> ab(static_cast<std::size_t>(ld) * n_, 0.0);
    for (int k = 0; k < A.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
        const int p = inv_[it.row()];
        const int q = inv_[it.col()];
        if (p > q) continue;
        ab[static_cast<std::size_t>(kd_ + p - q) + static_cast<std::size_t>(q) * ld] =
            d_[it.row()] * d_[it.col()] * it.value();
      }
    }
    return ab;
  }

  // LU of D (K - sigma M) D; false if exactly singular.
  bool factor(const Assembly& as, double sigma) {
    const int ld = 3 * kd_ + 1;
    lu_.assign(static_cast<std::size_t>(ld) * n_, 0.0);
    piv_.assign(n_, 0);
    auto put = [&](const Eigen::SparseMatrix<double>& A, double factor) {
      for (int k = 0; k < A.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
          const int p = inv_[it.row()];
          const int q = inv_[it.col()];
          lu_[static_cast<std::size_t>(2 * kd_ + p - q) + static_cast<std::size_t>(q) * ld] +=
              factor * d_[it.row()] * d_[it.col()] * it.value();
        }
      }
    };
    put(as.stiffness, 1.0);
    put(as.mass, -sigma);
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kd_, kd_, lu_.data(), ld, piv_.data());
    if (info < 0) fail(ErrorCode::SolverFailure, "dgbtrf rejected argument " + std::to_string(-info));
    return info == 0;
  }

  // Solves (K - sigma M) U = B in place, column by column.
  void solve(Eigen::MatrixXd& B) const {
    const int ld = 3 * kd_ + 1;
    std::vector<double> rhs(static_cast<std::size_t>(n_) * B.cols());
    for (Eigen::Index c = 0; c < B.cols(); ++c) {
      for (int i = 0; i < n_; ++i) rhs[static_cast<std::size_t>(c) * n_ + inv_[i]] = d_[i] * B(i, c);
    }
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kd_, kd_, static_cast<lapack_int>(B.cols()),
                                           lu_.data(), ld, piv_.data(), rhs.data(), n_);
    if (info != 0) fail(ErrorCode::SolverFailure, "dgbtrs failed with info " + std::to_string(info));
    for (Eigen::Index c = 0; c < B.cols(); ++c) {
      for (int i = 0; i < n_; ++i) B(i, c) = d_[i] * rhs[static_cast<std::size_t>(c) * n_ + inv_[i]];
    }
  }

 private:
  int n_;
  int kd_ = 1;
  std::vector<int> perm_;
  std::vector<int> inv_;
  std::vector<double> d_;
  std::vector<double> lu_;
  std::vector<lapack_int> piv_;
};

// Stiffness Gram matrix summed element by element from nonnegative terms;
// this keeps small eigenvalues accurate relative to themselves.
Eigen::MatrixXd stiffness_gram(const ElementMoments& mom, const Eigen::MatrixXd& V, bool periodic) {
  const std::size_t ne = mom.m0.size();
  const auto n = static_cast<std::size_t>(V.rows());
  const Eigen::Index c = V.cols();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(c, c);
  Eigen::VectorXd diff(c);
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t j = periodic ? next_node(e, n) : e + 1;
    diff = V.row(static_cast<Eigen::Index>(j)) - V.row(static_cast<Eigen::Index>(e));
    G.noalias() += (mom.m0[e] / (mom.width[e] * mom.width[e])) * diff * diff.transpose();
  }
  return G;
}

std::vector<double> refine_cluster(const Assembly& as, BandedOperator& op, bool periodic,
                                   const std::vector<double>& estimate, std::uint64_t seed) {
  const auto c = static_cast<Eigen::Index>(estimate.size());
  const double lo = estimate.front();
  double sigma = lo - std::max(1e-9 * std::abs(lo), 1e-12);
  for (int attempt = 0; !op.factor(as, sigma); ++attempt) {
    if (attempt > 8) fail(ErrorCode::SolverFailure, "shifted operator stays singular");
    sigma -= std::max(1e-7 * std::abs(lo), 1e-10) * std::pow(4.0, attempt);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd V(op.size(), c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < V.rows(); ++i) V(i, j) = unit(rng);
  }

  Eigen::VectorXd ritz = Eigen::VectorXd::Constant(c, lo);
  for (int step = 0; step < kMaxRefineSteps; ++step) {
    Eigen::MatrixXd W = as.mass * V;
    op.solve(W);
    for (Eigen::Index j = 0; j < c; ++j) W.col(j) /= W.col(j).norm();
    const Eigen::MatrixXd Kr = stiffness_gram(as.moments, W, periodic);
    const Eigen::MatrixXd Mr = W.transpose() * (as.mass * W);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(Kr, Mr);
    if (small.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "Rayleigh-Ritz step failed");
    V = W * small.eigenvectors();
    const Eigen::VectorXd next = small.eigenvalues();
    const double change = (next - ritz).cwiseAbs().maxCoeff();
    ritz = next;
    if (step >= 1 && change <= 1e-15 * std::max(std::abs(ritz.maxCoeff()), 1e-300)) break;
  }
  std::vector<double> out(ritz.data(), ritz.data() + c);
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

}  // namespace

double Discretization::element_width(std::size_t e, double domain_length) const noexcept {
  if (periodic && e + 1 == nodes.size()) return domain_length - nodes[e] + nodes[0];
  return nodes[e + 1] - nodes[e];
}

double Discretization::max_element_width(double domain_length) const noexcept {
  double w = 0.0;
  for (std::size_t e = 0; e < element_count(); ++e) w = std::max(w, element_width(e, domain_length));
  return w;
}

std::uint64_t Discretization::fingerprint() const noexcept {
  detail::Fnv1a hash;
  hash.integer(nodes.size());
  for (double x : nodes) hash.real(x);
  hash.integer(periodic ? 1 : 0);
  hash.integer(quadrature_order);
  hash.integer(grading == Grading::Uniform ? 0 : 1);
  hash.real(strength);
  return hash.value();
}

Discretization make_discretization(const ModelSpace& space, std::size_t elements, Grading grading,
                                   double strength, std::size_t quadrature_order) {
  if (elements < 8) fail(ErrorCode::InvalidParameter, "a mesh needs at least 8 elements");
  if (quadrature_order == 0) fail(ErrorCode::InvalidParameter, "quadrature_order must be positive");
  if (!(strength >= 1.0) || !std::isfinite(strength)) {
    fail(ErrorCode::InvalidParameter, "grading strength must be >= 1");
  }
  const double L = space.domain_length();
  Discretization disc;
  disc.periodic = space.periodic();
  disc.quadrature_order = quadrature_order;
  disc.strength = strength;

  if (disc.periodic) {
    disc.nodes.resize(elements);
    for (std::size_t i = 0; i < elements; ++i) disc.nodes[i] = L * static_cast<double>(i) / static_cast<double>(elements);
    return disc;
  }

  const bool start = space.vanishes_at_start();
  const bool end = space.vanishes_at_end();
  const bool graded = grading == Grading::BoundaryGraded && (start || end) && strength > 1.0;
  disc.grading = graded ? Grading::BoundaryGraded : Grading::Uniform;
  std::vector<double> raw(elements + 1);
  for (std::size_t i = 0; i <= elements; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(elements);
    raw[i] = graded ? L * power_grade(s, strength, start, end) : L * s;
  }
  raw.front() = 0.0;
  raw.back() = L;

  // Merge elements whose mass underflows.
  const double floor = 1e-30 * space.total_mass();
  disc.nodes.push_back(raw.front());
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const bool last = i + 1 == raw.size();
    if (!last && space.mass_between(disc.nodes.back(), raw[i]) < floor) continue;
    if (last && disc.nodes.size() > 1 && space.mass_between(disc.nodes.back(), raw[i]) < floor) {
      disc.nodes.pop_back();
    }
    disc.nodes.push_back(raw[i]);
  }
  return disc;
}

Assembly assemble(const ModelSpace& space, const Discretization& disc) {
  if (disc.periodic != space.periodic()) fail(ErrorCode::DomainMismatch, "mesh and space disagree on periodicity");
  const std::size_t n = disc.nodes.size();
  if (n < 3) fail(ErrorCode::InvalidParameter, "mesh has too few nodes");
  const double L = space.domain_length();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(disc.nodes[i + 1] > disc.nodes[i])) fail(ErrorCode::InvalidParameter, "mesh nodes must increase");
  }
  if (disc.nodes.front() != 0.0 || (disc.periodic ? disc.nodes.back() >= L : disc.nodes.back() != L)) {
    fail(ErrorCode::InvalidParameter, "mesh does not span the domain");
  }

  Assembly as;
  as.moments = element_moments(space, disc);
  const ElementMoments& mom = as.moments;
  std::vector<Eigen::Triplet<double>> kt;
  std::vector<Eigen::Triplet<double>> mt;
  kt.reserve(4 * mom.m0.size());
  mt.reserve(4 * mom.m0.size());
  for (std::size_t e = 0; e < mom.m0.size(); ++e) {
    if (!(mom.m0[e] > 0.0)) {
      fail(ErrorCode::SingularMass, "element " + std::to_string(e) + " on [" + std::to_string(disc.nodes[e]) + ", " +
                                        std::to_string(disc.nodes[e] + mom.width[e]) + "] carries no mass");
    }
    const auto a = static_cast<int>(e);
    const auto b = static_cast<int>(disc.periodic ? next_node(e, n) : e + 1);
    const double k = mom.m0[e] / (mom.width[e] * mom.width[e]);
    kt.emplace_back(a, a, k);
    kt.emplace_back(b, b, k);
    kt.emplace_back(a, b, -k);
    kt.emplace_back(b, a, -k);
    const double maa = mom.m0[e] - 2.0 * mom.m1[e] + mom.m2[e];
    const double mab = mom.m1[e] - mom.m2[e];
    mt.emplace_back(a, a, maa);
    mt.emplace_back(b, b, mom.m2[e]);
    mt.emplace_back(a, b, mab);
    mt.emplace_back(b, a, mab);
  }
  const auto dim = static_cast<Eigen::Index>(n);
  as.stiffness.resize(dim, dim);
  as.mass.resize(dim, dim);
  as.stiffness.setFromTriplets(kt.begin(), kt.end());
  as.mass.setFromTriplets(mt.begin(), mt.end());
  return as;
}

Spectrum::Spectrum(std::vector<double> computed, std::size_t resolved_count, double mesh_size,
                   std::uint64_t space_fingerprint, double hausdorff_length, double resolution_threshold)
    : computed_(std::move(computed)),
      resolved_count_(resolved_count),
      mesh_size_(mesh_size),
      fingerprint_(space_fingerprint),
      hausdorff_length_(hausdorff_length),
      threshold_(resolution_threshold) {
  if (resolved_count_ > computed_.size()) fail(ErrorCode::InvalidParameter, "resolved_count exceeds computed count");
  if (!std::is_sorted(computed_.begin(), computed_.end())) {
    fail(ErrorCode::InvalidParameter, "eigenvalues must be sorted ascending");
  }
  if (computed_.size() > resolved_count_) {
    trusted_ = threshold_;
  } else {
    trusted_ = resolved_count_ > 0 ? computed_[resolved_count_ - 1] : 0.0;
  }
}

Spectrum Spectrum::synthetic(std::vector<double> eigenvalues, double hausdorff_length, double trusted_limit,
                             std::uint64_t fingerprint) {
  const std::size_t count = eigenvalues.size();
  Spectrum s(std::move(eigenvalues), count, 0.0, fingerprint, hausdorff_length, trusted_limit);
  s.trusted_ = trusted_limit;
  return s;
}

Spectrum eigen_solve(const ModelSpace& space, const Discretization& disc, std::size_t count_requested) {
  if (count_requested < 1) fail(ErrorCode::InvalidParameter, "count_requested must be at least 1");
  const Assembly as = assemble(space, disc);
  const int n = static_cast<int>(as.mass.rows());
  const int count = static_cast<int>(std::min<std::size_t>(count_requested, static_cast<std::size_t>(n)));

  BandedOperator op(as, disc.periodic);
  const int kd = op.bandwidth();
  std::vector<double> ab = op.symmetric_band(as.stiffness);
  std::vector<double> bb = op.symmetric_band(as.mass);
  std::vector<double> w(n);
  std::vector<lapack_int> ifail(n);
  double q_dummy = 0.0;
  double z_dummy = 0.0;
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsbgvx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kd, kd, ab.data(), kd + 1, bb.data(), kd + 1, &q_dummy, 1,
                     0.0, 0.0, 1, count, 2.0 * LAPACKE_dlamch('S'), &found, w.data(), &z_dummy, 1, ifail.data());
  if (info != 0 || found != count) {
    fail(ErrorCode::SolverFailure, "dsbgvx failed with info " + std::to_string(info));
  }
  w.resize(found);

  std::vector<double> refined;
  refined.reserve(w.size());
  std::size_t begin = 0;
  while (begin < w.size()) {
    std::size_t end = begin + 1;
    while (end < w.size() &&
           w[end] - w[end - 1] <= kClusterGap * std::max({std::abs(w[end]), std::abs(w[end - 1]), 1e-300})) {
      ++end;
    }
    const std::vector<double> cluster(w.begin() + static_cast<std::ptrdiff_t>(begin),
                                      w.begin() + static_cast<std::ptrdiff_t>(end));
    const auto values = refine_cluster(as, op, disc.periodic, cluster, 0x9e3779b97f4a7c15ull ^ begin);
    refined.insert(refined.end(), values.begin(), values.end());
    begin = end;
  }
  std::sort(refined.begin(), refined.end());
  // Constants span the exact kernel; drop the rounding noise on the zero mode.
  if (refined.size() > 1 && std::abs(refined[0]) <= 1e-8 * refined[1]) refined[0] = 0.0;

  const double h_max = disc.max_element_width(space.domain_length());
  const double threshold = kResolutionSafety * (kPi / h_max) * (kPi / h_max);
  const auto resolved = static_cast<std::size_t>(
      std::upper_bound(refined.begin(), refined.end(), threshold) - refined.begin());
  return Spectrum(std::move(refined), resolved, h_max, space.fingerprint(), space.hausdorff_length(), threshold);
}

std::size_t counting_function(const Spectrum& spec, double lambda) {
  if (!(lambda >= 0.0)) fail(ErrorCode::InvalidParameter, "counting_function needs lambda >= 0");
  if (lambda > spec.trusted_limit()) {
    fail(ErrorCode::BeyondResolvedRange, "lambda " + std::to_string(lambda) + " exceeds the trusted limit " +
                                             std::to_string(spec.trusted_limit()));
  }
  const auto ev = spec.eigenvalues();
  return static_cast<std::size_t>(std::upper_bound(ev.begin(), ev.end(), lambda) - ev.begin());
}

double weyl_tail(const Spectrum& spec, double t) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidParameter, "heat trace needs t > 0");
  const double c = spec.hausdorff_length() / kPi;
  return c * std::sqrt(kPi) / (2.0 * std::sqrt(t)) * std::erfc(std::sqrt(t * spec.trusted_limit()));
}

double heat_trace(const Spectrum& spec, double t, bool tail_model) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidParameter, "heat trace needs t > 0");
  const auto ev = spec.eigenvalues();
  double sum = 0.0;
  for (auto it = ev.rbegin(); it != ev.rend(); ++it) sum += std::exp(-*it * t);
  const double tail = weyl_tail(spec, t);
  if (tail_model) return sum + tail;
  if (tail > 1e-6 * sum) {
    fail(ErrorCode::UnresolvedTail, "t = " + std::to_string(t) + " leaves an estimated unresolved tail of " +
                                        std::to_string(tail / sum) + " relative");
  }
  return sum;
}

}  // namespace weyl1d
