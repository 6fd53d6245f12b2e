#include "weyl1d/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "weyl1d/error.hpp"

namespace weyl1d {

namespace {

constexpr double kPi = std::numbers::pi;

Fixture sin_power_fixture(int N) {
  Fixture f{
      .name = "sinpow_N" + std::to_string(N),
      .description = "[0,pi] with h = sin^" + std::to_string(N - 1) + ", K = " + std::to_string(1 - N) +
                     ", N = " + std::to_string(N),
      .space = sin_power_space(N),
      .eigenvalue_law = "k(k+" + std::to_string(N - 1) + ")",
      .reference_source = "ultraspherical polynomial recurrence",
      .exact_eigenvalue = [N](std::size_t k) { return static_cast<double>(k) * static_cast<double>(k + N - 1); },
      .weyl_target = 1.0,
  };
  return f;
}

}  // namespace

ModelSpace sin_power_space(double N, bool normalize) {
  return make_space(Interval{kPi}, DensitySpec{SinPower{N - 1.0}, {-(N - 1.0), N}, 1.0, normalize});
}

std::vector<std::string> fixture_names() {
  return {"flat_pi", "circle_r1", "sinpow_N2", "sinpow_N3", "sinpow_N4", "sampled_near_degenerate"};
}

Fixture make_fixture(const std::string& name) {
  if (name == "flat_pi") {
    return Fixture{
        .name = name,
        .description = "[0,pi] with h = 1, K = -1, N = 2",
        .space = make_space(Interval{kPi}, DensitySpec{ConstantDensity{1.0}, {-1.0, 2.0}}),
        .eigenvalue_law = "k^2",
        .reference_source = "Neumann cosine modes",
        .exact_eigenvalue = [](std::size_t k) { return static_cast<double>(k) * static_cast<double>(k); },
        .weyl_target = 1.0,
    };
  }
  if (name == "circle_r1") {
    return Fixture{
        .name = name,
        .description = "circle of radius 1 with h = 1, K = -1, N = 2",
        .space = make_space(Circle{1.0}, DensitySpec{ConstantDensity{1.0}, {-1.0, 2.0}}),
        .eigenvalue_law = "k^2, multiplicity 2 for k >= 1",
        .reference_source = "Fourier modes",
        .exact_eigenvalue =
            [](std::size_t i) {
              const double k = static_cast<double>((i + 1) / 2);
              return k * k;
            },
        .weyl_target = 2.0,
    };
  }
  if (name == "sinpow_N2") return sin_power_fixture(2);
  if (name == "sinpow_N3") return sin_power_fixture(3);
  if (name == "sinpow_N4") return sin_power_fixture(4);
  if (name == "sampled_near_degenerate") {
    SampledDensity s;
    const std::size_t n = 2001;
    s.grid.resize(n);
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = kPi * static_cast<double>(i) / static_cast<double>(n - 1);
      s.grid[i] = x;
      const double g = 0.01 + std::sin(x);
      s.values[i] = g * g;
    }
    s.grid.back() = kPi;
    return Fixture{
        .name = name,
        .description = "[0,pi] with h = (0.01 + sin)^2 sampled at 2001 points, K = -2, N = 3; the "
                       "log-linear interpolant fails the convexity sampling near the ends",
        .space = make_space(Interval{kPi}, DensitySpec{std::move(s), {-2.0, 3.0}}),
        .eigenvalue_law = "",
        .reference_source = "none (numerical only)",
        .exact_eigenvalue = nullptr,
        .weyl_target = 1.0,
    };
  }
  fail(ErrorCode::InvalidParameter, "unknown fixture '" + name + "'");
}

std::vector<Fixture> list_fixtures() {
  std::vector<Fixture> out;
  for (const auto& n : fixture_names()) out.push_back(make_fixture(n));
  return out;
}

}  // namespace weyl1d
