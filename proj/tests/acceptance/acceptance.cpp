// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance --only N   run criterion N

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "weyl1d/convexity.hpp"
#include "weyl1d/error.hpp"
#include "weyl1d/fixtures.hpp"
#include "weyl1d/harness.hpp"
#include "weyl1d/measure.hpp"
#include "weyl1d/spectral.hpp"
#include "weyl1d/spectrum_cache.hpp"

using namespace weyl1d;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool passed = true;
  std::ostringstream detail;
  std::string failed;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      failed += failed.empty() ? what : ", " + what;
    }
  }
  template <class T>
  Verdict& operator<<(const T& v) {
    detail << v;
    return *this;
  }
};

double rel(double a, double b) { return std::abs(a / b - 1.0); }

Spectrum fixture_spectrum(const Fixture& fx, Grading grading, std::size_t elements = 0) {
  const std::size_t n = elements ? elements : fx.default_elements;
  const auto disc = make_discretization(fx.space, n, grading);
  return cached_eigen_solve(fx.space, disc, n / 4 + 64);
}

Spectrum fixture_spectrum(const Fixture& fx) {
  const bool degenerate = fx.space.vanishes_at_start() || fx.space.vanishes_at_end();
  return fixture_spectrum(fx, degenerate ? Grading::BoundaryGraded : Grading::Uniform);
}

std::vector<Fixture> primary_fixtures() {
  return {make_fixture("flat_pi"), make_fixture("circle_r1"), make_fixture("sinpow_N2"), make_fixture("sinpow_N3"),
          make_fixture("sinpow_N4")};
}

// 1. Flat interval Weyl law.
void criterion1(Verdict& v) {
  const auto fx = make_fixture("flat_pi");
  const auto t0 = std::chrono::steady_clock::now();
  const auto disc = make_discretization(fx.space, 4000, Grading::Uniform);
  const Spectrum spec = eigen_solve(fx.space, disc, 4000 / 4 + 64);
  const auto tail = weyl_tail_check(spec, 0.05);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v << "resolved " << spec.resolved_count() << ", tail ratio " << tail.measured << " (max rel err "
    << tail.max_relative_error << ") vs " << tail.target << ", " << secs << " s";
  v.require(spec.resolved_count() >= 300, "resolved >= 300");
  v.require(tail.ok, "tail within 5%");
  v.require(tail.target == 1.0, "target 1");
  v.require(secs < 30.0, "runtime < 30 s");
}

// 2. Circle Weyl law and doubled Fourier modes.
void criterion2(Verdict& v) {
  const auto fx = make_fixture("circle_r1");
  const Spectrum spec = fixture_spectrum(fx, Grading::Uniform);
  const auto tail = weyl_tail_check(spec, 0.05);
  double worst = 0.0;
  for (std::size_t i = 1; i <= 30; ++i) worst = std::max(worst, rel(spec.eigenvalues()[i], fx.exact_eigenvalue(i)));
  v << "tail ratio " << tail.measured << " (max rel err " << tail.max_relative_error << ") vs " << tail.target
    << ", k<=15 pair error " << worst;
  v.require(tail.ok && tail.target == 2.0, "tail within 5% of 2");
  v.require(worst <= 1e-3, "k^2 pairs to 1e-3");
}

// 3. Degenerate densities sin^{N-1}.
void criterion3(Verdict& v) {
  for (int N : {2, 3, 4}) {
    const auto fx = make_fixture("sinpow_N" + std::to_string(N));
    const Spectrum spec = fixture_spectrum(fx, Grading::BoundaryGraded);
    const auto tail = weyl_tail_check(spec, 0.05);
    const auto oracle_ev = oracle::ultraspherical_eigenvalues(N - 1.0, 11);
    double worst = 0.0;
    for (std::size_t k = 1; k <= 10; ++k) worst = std::max(worst, rel(spec.eigenvalues()[k], oracle_ev[k]));
    v << "N=" << N << ": tail " << tail.measured << " (max rel err " << tail.max_relative_error << "), k(k+N-1) err "
      << worst << "; ";
    v.require(tail.ok && tail.target == 1.0, "N=" + std::to_string(N) + " tail");
    v.require(worst <= 1e-3, "N=" + std::to_string(N) + " low eigenvalues");
  }
}

// 4. Ratio integral extrapolates to H^1/2; flat closed form pointwise.
void criterion4(Verdict& v) {
  for (const auto& fx : primary_fixtures()) {
    const RatioProfile p = ratio_profile(fx.space);
    const double e = rel(p.extrapolated_limit, p.target);
    v << fx.name << " " << e << "; ";
    v.require(e <= 1e-3, fx.name + " limit");
    v.require(std::abs(p.target - 0.5 * fx.space.hausdorff_length()) < 1e-15, fx.name + " target");
    if (fx.name == "flat_pi") {
      double worst = 0.0;
      for (std::size_t i = 0; i < p.radii.size(); ++i) {
        worst = std::max(worst, std::abs(p.integrals[i] - oracle::flat_ratio_integral(kPi, p.radii[i])));
      }
      v << "flat closed form err " << worst << "; ";
      v.require(worst <= 1e-8, "flat closed form");
    }
  }
}

// 5. Domination bound on every convex fixture.
void criterion5(Verdict& v) {
  std::size_t checked = 0;
  for (const auto& name : fixture_names()) {
    const auto fx = make_fixture(name);
    if (!check_density_convexity(fx.space).passed) {
      v << name << " not convex, skipped; ";
      continue;
    }
    const double N = fx.space.density_spec().cd.N;
    const auto g = default_domination_grid(fx.space, 200, 20);
    const auto d = domination_bound_check(fx.space, N, g.r, g.x);
    v << name << " sup " << d.sup_observed << " <= " << d.bound << "; ";
    v.require(d.ok, name);
    ++checked;
  }
  v.require(checked >= 5, "at least the five primary fixtures checked");
}

// 6. Heat-trace liminf with k = 1.
void criterion6(Verdict& v) {
  for (const auto& fx : primary_fixtures()) {
    const Spectrum spec = fixture_spectrum(fx);
    const double d2 = fx.space.diameter() * fx.space.diameter();
    const auto t_grid = geometric_grid(1e-1 * d2, 1e-3 * d2, 41);
    const auto lim = heat_trace_limit(spec, 1.0, t_grid, 0.02, true);
    v << fx.name << " min " << lim.liminf_estimate << " (bound " << lim.lower_bound << ", ratio "
      << lim.liminf_estimate / lim.lower_bound << " at t=" << lim.argmin_t << "); ";
    v.require(lim.ok, fx.name);
  }
}

// 7. Abelian theorem on synthetic measures.
void criterion7(Verdict& v) {
  {
    const auto ag = geometric_grid(1.0, 1e6, 20);
    const auto tg = geometric_grid(1.0, 1e-4, 20);
    const auto r = abelian_check(LebesgueMeasure{}, 1.0, 1.0, ag, tg);
    double worst = 0.0;
    for (double x : r.t_values) worst = std::max(worst, std::abs(x - 1.0));
    v << "lebesgue max err " << worst << "; ";
    v.require(r.ok && worst <= 1e-12, "lebesgue exact");
  }
  {
    const auto nu = square_atoms(4000);
    const auto ag = geometric_grid(1e-2 * nu.known_up_to, nu.known_up_to, 20);
    const auto tg = geometric_grid(4000.0 / nu.known_up_to, 40.0 / nu.known_up_to, 20);
    const auto r = abelian_check(nu, 0.5, 1.0, ag, tg);
    v << "squares rel err " << r.relative_error << "; ";
    v.require(r.ok && r.relative_error <= 0.01, "squares");
  }
  {
    const double c = 1.0 / (4.0 * kPi);
    const auto nu = lambda_log_lambda_atoms(20000, c);
    const auto ag = geometric_grid(1e-2 * nu.known_up_to, nu.known_up_to, 20);
    const auto tg = geometric_grid(4000.0 / nu.known_up_to, 40.0 / nu.known_up_to, 20);
    AbelianOptions o;
    o.slow = SlowVariation::Log;
    const auto r = abelian_check(nu, 1.0, c, ag, tg, o);
    v << "lambda log lambda rel err " << r.relative_error;
    v.require(r.ok && r.relative_error <= 0.01, "lambda log lambda");
  }
}

// 8. Sinh-ratio bounds.
void criterion8(Verdict& v) {
  std::mt19937_64 rng(8);
  for (const auto& name : fixture_names()) {
    const auto fx = make_fixture(name);
    if (fx.space.periodic() || !(fx.space.density_spec().cd.K < 0.0)) continue;
    if (!check_density_convexity(fx.space).passed) continue;
    const double L = fx.space.domain_length();
    std::uniform_real_distribution<double> u(0.0, L);
    std::size_t bad = 0, tested = 0;
    while (tested < 1000) {
      double x0 = u(rng), x1 = u(rng);
      if (x1 < x0) std::swap(x0, x1);
      if (!(x0 > 0.0 && x1 > x0 && x1 < L)) continue;
      if (!sinh_ratio_bounds(fx.space, x0, x1).ok) ++bad;
      ++tested;
    }
    v << name << " " << bad << "/1000 violations; ";
    v.require(bad == 0, name);
  }
  double worst = 0.0;
  for (double N : {2.0, 3.0, 4.0, 5.5}) {
    const double c2 = N - 1.0;
    auto h = [N](double x) { return std::pow(std::sinh(x), N - 1.0); };
    for (double x0 : {0.1, 0.7, 1.5}) {
      const auto b = sinh_ratio_bounds(h, 0.0, 4.0, -c2, N, x0, x0 + 1.3);
      worst = std::max(worst, rel(b.value, b.upper));
    }
  }
  v << "sinh equality err " << worst;
  v.require(worst <= 1e-10, "equality case");
}

// 9. Measure and distance scaling.
void criterion9(Verdict& v) {
  for (const char* name : {"flat_pi", "sinpow_N3", "circle_r1"}) {
    const auto fx = make_fixture(name);
    const DensitySpec& d = fx.space.density_spec();
    const auto disc = make_discretization(fx.space, 1000);
    const Spectrum s0 = eigen_solve(fx.space, disc, 200);
    double worst_b = 0.0;
    for (double b : {1e-3, 7.5, 1e3}) {
      const auto sb = make_space(fx.space.kind(), scale_measure(d, b));
      const Spectrum s1 = eigen_solve(sb, disc, 200);
      for (std::size_t i = 1; i < s0.resolved_count(); ++i) {
        worst_b = std::max(worst_b, rel(s1.eigenvalues()[i], s0.eigenvalues()[i]));
      }
      if (s1.resolved_count() != s0.resolved_count()) worst_b = INFINITY;
    }
    double worst_a = 0.0, worst_w = 0.0;
    for (double a : {0.5, 2.0, 10.0}) {
      const auto sa = make_space(dilate(fx.space.kind(), a), dilate(d, a));
      const Spectrum s1 = eigen_solve(sa, make_discretization(sa, 1000), 200);
      for (std::size_t i = 1; i < s0.resolved_count(); ++i) {
        worst_a = std::max(worst_a, rel(s1.eigenvalues()[i] * a * a, s0.eigenvalues()[i]));
      }
      worst_w = std::max(worst_w, rel(weyl_constant(s1), a * weyl_constant(s0)));
      worst_w = std::max(worst_w, rel(weyl_tail_check(s1).measured, a * weyl_tail_check(s0).measured));
    }
    v << name << ": b-scaling " << worst_b << ", a-scaling " << worst_a << ", Weyl constant " << worst_w << "; ";
    v.require(worst_b <= 1e-12, std::string(name) + " measure scaling");
    v.require(worst_a <= 1e-8, std::string(name) + " distance scaling");
    v.require(worst_w <= 1e-8, std::string(name) + " Weyl constant scaling");
  }
}

// 10. Dimension classifier.
void criterion10(Verdict& v) {
  for (const auto& name : fixture_names()) {
    const auto fx = make_fixture(name);
    const auto dim = classify_dimension(fixture_spectrum(fx));
    v << name << " e=" << dim.fit.exponent << (dim.is_one_dimensional ? " 1D" : " not-1D") << "; ";
    v.require(dim.is_one_dimensional, name);
  }
  const auto lin = classify_dimension(linear_spectrum(5000));
  v << "linear e=" << lin.fit.exponent << "; ";
  v.require(!lin.is_one_dimensional, "linear spectrum rejected");
  const auto ll = classify_dimension(spectrum_from_atoms(lambda_log_lambda_atoms(20000, 1.0 / (4.0 * kPi))));
  v << "lambda log lambda spread " << ll.fit.log_ratio_spread;
  v.require(ll.fit.log_correction_detected, "log correction detected");
}

// 11. Second-order eigenvalue convergence.
void criterion11(Verdict& v) {
  for (const char* name : {"flat_pi", "circle_r1"}) {
    const auto fx = make_fixture(name);
    std::vector<std::vector<double>> lv;
    for (std::size_t n : {200, 400, 800, 1600}) {
      const Spectrum s = eigen_solve(fx.space, make_discretization(fx.space, n, Grading::Uniform), 11);
      lv.emplace_back(s.computed().begin(), s.computed().end());
    }
    double lo = 1e9, hi = -1e9;
    for (std::size_t k = 1; k <= 10; ++k) {
      for (std::size_t j = 0; j + 2 < lv.size(); ++j) {
        const double p = std::log2((lv[j][k] - lv[j + 1][k]) / (lv[j + 1][k] - lv[j + 2][k]));
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    }
    v << name << " order in [" << lo << ", " << hi << "]; ";
    v.require(lo >= 1.8 && hi <= 2.2, name);
  }
}

const std::vector<std::pair<std::string, std::function<void(Verdict&)>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> list{
      {"flat interval Weyl law", criterion1},
      {"circle Weyl law", criterion2},
      {"degenerate sin^{N-1} Weyl law", criterion3},
      {"ratio integral limit", criterion4},
      {"domination bound", criterion5},
      {"heat-trace liminf", criterion6},
      {"Abelian theorem", criterion7},
      {"sinh-ratio bounds", criterion8},
      {"scaling invariances", criterion9},
      {"dimension classifier", criterion10},
      {"numerical convergence order", criterion11},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 1;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria().size())) {
    std::fprintf(stderr, "criterion %d does not exist\n", only);
    return 1;
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Verdict v;
    try {
      criteria()[i].second(v);
    } catch (const std::exception& e) {
      v.passed = false;
      v << " exception: " << e.what();
    }
    std::string detail = v.detail.str();
    if (!v.failed.empty()) detail += " | failed: " + v.failed;
    std::printf("[%s] criterion %zu: %s: %s\n", v.passed ? "PASS" : "FAIL", i + 1, criteria()[i].first.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!v.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
