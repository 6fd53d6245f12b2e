#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "weyl1d/geometry.hpp"

namespace weyl1d {

/// A bundled model space with its analytic reference data.
struct Fixture {
  std::string name;
  std::string description;
  ModelSpace space;
  /// Human-readable eigenvalue law, e.g. "k(k+2)"; empty if none is known.
  std::string eigenvalue_law;
  /// Where the reference law comes from, in plain words.
  std::string reference_source;
  /// Exact i-th eigenvalue (with multiplicity, zero mode at i = 0), if known.
  std::function<double(std::size_t)> exact_eigenvalue;
  /// H^1 / pi.
  double weyl_target = 0.0;
  /// Suggested element count for desk-scale runs.
  std::size_t default_elements = 4000;
};

std::vector<std::string> fixture_names();
/// Throws InvalidParameter for an unknown name.
Fixture make_fixture(const std::string& name);
std::vector<Fixture> list_fixtures();

/// [0, pi] with h = sin^{N-1}, K = -(N-1).
ModelSpace sin_power_space(double N, bool normalize = false);

}  // namespace weyl1d
