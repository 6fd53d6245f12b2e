#include "weyl1d/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "weyl1d/convexity.hpp"
#include "weyl1d/error.hpp"
#include "weyl1d/quadrature.hpp"
#include "hash.hpp"

namespace weyl1d {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative slack for matching sampled grids and SinPower periods to a domain.
constexpr double kDomainSlack = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool close_to(double a, double b) { return std::abs(a - b) <= kDomainSlack * std::max(1.0, std::abs(b)); }

}  // namespace

CurvatureDimension::CurvatureDimension(double K_, double N_) : K(K_), N(N_) {
  if (!std::isfinite(K_)) fail(ErrorCode::InvalidParameter, "curvature bound K must be finite");
  if (!(N_ > 1.0) || !std::isfinite(N_)) {
    fail(ErrorCode::InvalidParameter, "dimension bound N must lie in (1, inf), got " + std::to_string(N_));
  }
}

double domain_length(const SpaceKind& kind) {
  return std::visit(overloaded{[](const Interval& i) { return i.length; },
                               [](const Circle& c) { return 2.0 * kPi * c.radius; }},
                    kind);
}

bool is_circle(const SpaceKind& kind) noexcept { return std::holds_alternative<Circle>(kind); }

void validate_kind(const SpaceKind& kind) {
  std::visit(overloaded{[](const Interval& i) {
                          if (!(i.length > 0.0) || !std::isfinite(i.length)) {
                            fail(ErrorCode::InvalidParameter, "interval length must be positive");
                          }
                        },
                        [](const Circle& c) {
                          if (!(c.radius > 0.0) || !std::isfinite(c.radius)) {
                            fail(ErrorCode::InvalidParameter, "circle radius must be positive");
                          }
                        }},
             kind);
}

FunctionSpec FunctionSpec::polynomial(std::vector<double> coefficients) {
  FunctionSpec spec;
  spec.name = "polynomial";
  spec.parameters = coefficients;
  spec.evaluate = [c = std::move(coefficients)](double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  return spec;
}

FunctionSpec FunctionSpec::custom(std::string name, std::function<double(double)> fn,
                                  std::vector<double> parameters) {
  return FunctionSpec{std::move(name), std::move(parameters), std::move(fn)};
}

DensitySpec scale_measure(DensitySpec density, double b) {
  if (!(b > 0.0) || !std::isfinite(b)) fail(ErrorCode::InvalidParameter, "measure scale must be positive");
  density.multiplier *= b;
  return density;
}

DensitySpec dilate(DensitySpec density, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorCode::InvalidParameter, "dilation must be positive");
  std::visit(overloaded{[](ConstantDensity&) {},
                        [a](ExpNegF& e) {
                          auto inner = e.f.evaluate;
                          e.f.name = "dilated:" + e.f.name;
                          e.f.parameters.push_back(a);
                          e.f.evaluate = [inner, a](double x) { return inner(x / a); };
                        },
                        [a](SinPower& s) { s.scale *= a; },
                        [a](SampledDensity& s) {
                          for (double& g : s.grid) g *= a;
                        }},
             density.family);
  return density;
}

SpaceKind dilate(const SpaceKind& kind, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorCode::InvalidParameter, "dilation must be positive");
  return std::visit(overloaded{[a](const Interval& i) -> SpaceKind { return Interval{i.length * a}; },
                               [a](const Circle& c) -> SpaceKind { return Circle{c.radius * a}; }},
                    kind);
}

double ModelSpace::raw_density(double x) const noexcept {
  return std::visit(
      overloaded{
          [](const ConstantDensity& c) { return c.value; },
          [x](const ExpNegF& e) { return std::exp(-e.f(x)); },
          [x](const SinPower& s) {
            // Reflect about the midpoint so sin is evaluated near zero at both ends.
            double u = x / s.scale;
            u = std::min(u, kPi - u);
            if (!(u > 0.0)) return s.exponent == 0.0 ? 1.0 : 0.0;
            return std::pow(std::sin(u), s.exponent);
          },
          [x](const SampledDensity& s) {
            const auto& g = s.grid;
            auto it = std::upper_bound(g.begin(), g.end(), x);
            if (it == g.begin()) return s.values.front();
            if (it == g.end()) return s.values.back();
            const std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
            const double v0 = s.values[i];
            const double v1 = s.values[i + 1];
            const double frac = (x - g[i]) / (g[i + 1] - g[i]);
            if (v0 == 0.0 || v1 == 0.0) return v0 + (v1 - v0) * frac;
            return v0 * std::pow(v1 / v0, frac);
          }},
      density_.family);
}

double ModelSpace::density(double x) const noexcept {
  if (periodic_ && x >= length_) x -= length_;
  return scale_ * raw_density(x);
}

double ModelSpace::sampled_partial(std::size_t segment, double s0, double s1) const noexcept {
  const auto& s = std::get<SampledDensity>(density_.family);
  const double width = s.grid[segment + 1] - s.grid[segment];
  const double v0 = s.values[segment];
  const double v1 = s.values[segment + 1];
  if (v0 == 0.0 || v1 == 0.0) {
    return width * (v0 * (s1 - s0) + 0.5 * (v1 - v0) * (s1 * s1 - s0 * s0));
  }
  const double rho = std::log(v1 / v0);
  if (rho == 0.0) return width * v0 * (s1 - s0);
  return width * v0 * std::exp(rho * s0) * std::expm1(rho * (s1 - s0)) / rho;
}

double ModelSpace::raw_mass_between(double a, double b) const {
  if (!(b > a)) return 0.0;
  return std::visit(
      overloaded{[&](const ConstantDensity& c) { return c.value * (b - a); },
                 [&](const SampledDensity& s) {
                   const auto& g = s.grid;
                   auto locate = [&g](double x) {
                     auto it = std::upper_bound(g.begin(), g.end(), x);
                     std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
                     return std::min(i, g.size() - 2);
                   };
                   const std::size_t ia = locate(a);
                   const std::size_t ib = locate(b);
                   auto frac = [&g](std::size_t i, double x) {
                     return std::clamp((x - g[i]) / (g[i + 1] - g[i]), 0.0, 1.0);
                   };
                   if (ia == ib) return sampled_partial(ia, frac(ia, a), frac(ia, b));
                   double total = sampled_partial(ia, frac(ia, a), 1.0);
                   total += cumulative_[ib] - cumulative_[ia + 1];
                   total += sampled_partial(ib, 0.0, frac(ib, b));
                   return total;
                 },
                 [&](const auto&) {
                   auto f = [this](double x) { return raw_density(x); };
                   // Split at sample breakpoints so each panel is smooth.
                   double total = 0.0;
                   double left = a;
                   auto first = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), a);
                   for (auto it = first; it != breakpoints_.end() && *it < b; ++it) {
                     total += integrate_adaptive(f, left, *it, 1e-13);
                     left = *it;
                   }
                   return total + integrate_adaptive(f, left, b, 1e-13);
                 }},
      density_.family);
}

double ModelSpace::mass_between(double a, double b) const { return scale_ * raw_mass_between(a, b); }

ModelSpace make_space(SpaceKind kind, DensitySpec density, bool validate) {
  validate_kind(kind);
  if (!(density.multiplier > 0.0) || !std::isfinite(density.multiplier)) {
    fail(ErrorCode::InvalidParameter, "density multiplier must be positive");
  }
  // Re-run the CD constructor checks in case the pair was default-built and mutated.
  density.cd = CurvatureDimension(density.cd.K, density.cd.N);

  ModelSpace space;
  space.kind_ = kind;
  space.periodic_ = is_circle(kind);
  space.length_ = domain_length(kind);
  const double L = space.length_;

  std::visit(
      overloaded{
          [](const ConstantDensity& c) {
            if (c.value == 0.0) fail(ErrorCode::InteriorZeroDensity, "constant density is zero");
            if (!(c.value > 0.0) || !std::isfinite(c.value)) {
              fail(ErrorCode::InvalidParameter, "constant density must be positive and finite");
            }
          },
          [&](const SinPower& s) {
            if (space.periodic_) fail(ErrorCode::DomainMismatch, "SinPower density lives on an interval");
            if (!(s.exponent >= 0.0) || !std::isfinite(s.exponent)) {
              fail(ErrorCode::InvalidParameter, "SinPower exponent must be nonnegative");
            }
            if (!(s.scale > 0.0)) fail(ErrorCode::InvalidParameter, "SinPower scale must be positive");
            if (!close_to(L, kPi * s.scale)) {
              fail(ErrorCode::DomainMismatch, "SinPower with scale " + std::to_string(s.scale) +
                                                  " needs interval length " + std::to_string(kPi * s.scale));
            }
          },
          [&](SampledDensity& s) {
            if (s.grid.size() < 2 || s.grid.size() != s.values.size()) {
              fail(ErrorCode::InvalidParameter, "sampled density needs matching grid and values, size >= 2");
            }
            for (std::size_t i = 1; i < s.grid.size(); ++i) {
              if (!(s.grid[i] > s.grid[i - 1])) {
                fail(ErrorCode::InvalidParameter, "sampled grid must be strictly increasing");
              }
            }
            if (!close_to(s.grid.front() + L, L) || !close_to(s.grid.back(), L)) {
              fail(ErrorCode::DomainMismatch, "sampled grid must span [0, " + std::to_string(L) + "]");
            }
            s.grid.front() = 0.0;
            s.grid.back() = L;
            for (std::size_t i = 0; i < s.values.size(); ++i) {
              const double v = s.values[i];
              if (!(v >= 0.0) || !std::isfinite(v)) {
                fail(ErrorCode::InvalidParameter, "sampled density values must be finite and nonnegative");
              }
              const bool end = (i == 0 || i + 1 == s.values.size());
              if (v == 0.0 && (!end || space.periodic_)) {
                fail(ErrorCode::InteriorZeroDensity,
                     "sampled density vanishes at interior coordinate " + std::to_string(s.grid[i]));
              }
            }
            if (space.periodic_ && !close_to(s.values.front(), s.values.back())) {
              fail(ErrorCode::DomainMismatch, "sampled density on a circle must agree at 0 and 2*pi*r");
            }
          },
          [](const ExpNegF& e) {
            if (!e.f.evaluate) fail(ErrorCode::InvalidParameter, "ExpNegF needs an evaluable f");
          }},
      density.family);

  space.density_ = std::move(density);

  if (const auto* s = std::get_if<SampledDensity>(&space.density_.family)) {
    space.breakpoints_.assign(s->grid.begin() + 1, s->grid.end() - 1);
    space.cumulative_.assign(s->grid.size(), 0.0);
    for (std::size_t i = 0; i + 1 < s->grid.size(); ++i) {
      space.cumulative_[i + 1] = space.cumulative_[i] + space.sampled_partial(i, 0.0, 1.0);
    }
  }

  if (std::holds_alternative<ExpNegF>(space.density_.family)) {
    constexpr int kProbe = 2048;
    for (int i = 1; i < kProbe; ++i) {
      const double x = L * i / kProbe;
      const double v = space.raw_density(x);
      if (std::isnan(v)) fail(ErrorCode::EvaluationFailure, "exp(-f) is NaN at " + std::to_string(x));
      if (v == 0.0) fail(ErrorCode::InteriorZeroDensity, "exp(-f) vanishes at " + std::to_string(x));
      if (!std::isfinite(v)) fail(ErrorCode::InvalidParameter, "exp(-f) is infinite at " + std::to_string(x));
    }
    if (space.periodic_ && !close_to(space.raw_density(0.0), space.raw_density(L))) {
      fail(ErrorCode::DomainMismatch, "exp(-f) on a circle must be periodic");
    }
  }

  const double raw_total = space.raw_mass_between(0.0, L);
  if (!(raw_total > 0.0) || !std::isfinite(raw_total)) {
    fail(ErrorCode::InvalidParameter, "density has no finite positive mass");
  }
  space.scale_ = space.density_.normalize ? 1.0 / raw_total : space.density_.multiplier;
  space.total_mass_ = space.density_.normalize ? 1.0 : space.density_.multiplier * raw_total;

  space.zero_start_ = !space.periodic_ && space.raw_density(0.0) == 0.0;
  space.zero_end_ = !space.periodic_ && space.raw_density(L) == 0.0;

  detail::Fnv1a hash;
  hash.integer(space.kind_.index());
  hash.real(L);
  hash.integer(space.density_.family.index());
  std::visit(overloaded{[&](const ConstantDensity& c) { hash.real(c.value); },
                        [&](const ExpNegF& e) {
                          hash.text(e.f.name);
                          for (double p : e.f.parameters) hash.real(p);
                        },
                        [&](const SinPower& s) {
                          hash.real(s.exponent);
                          hash.real(s.scale);
                        },
                        [&](const SampledDensity& s) {
                          hash.integer(s.grid.size());
                          for (double g : s.grid) hash.real(g);
                          for (double v : s.values) hash.real(v);
                        }},
             space.density_.family);
  hash.real(space.density_.cd.K);
  hash.real(space.density_.cd.N);
  hash.real(space.density_.multiplier);
  hash.integer(space.density_.normalize ? 1 : 0);
  space.fingerprint_ = hash.value();

  if (validate) {
    ConvexityOptions options;
    options.grid_resolution = 256;
    ConvexityReport report = check_density_convexity(space, options);
    if (!report.passed) {
      std::string where;
      if (report.witness) {
        where = " at (y0=" + std::to_string(report.witness->y0) + ", y1=" + std::to_string(report.witness->y1) +
                ", t=" + std::to_string(report.witness->t) + ")";
      }
      throw ConvexityViolationError("-log h is not (K, N-1)-convex" + where + ", margin " +
                                        std::to_string(report.worst_margin),
                                    std::move(report));
    }
  }
  return space;
}

void check_coordinate(const ModelSpace& space, double x) {
  const double L = space.domain_length();
  const bool ok = space.periodic() ? (x >= 0.0 && x < L) : (x >= 0.0 && x <= L);
  if (!ok) {
    fail(ErrorCode::OutOfDomain, "coordinate " + std::to_string(x) + " outside the domain of length " +
                                     std::to_string(L));
  }
}

double eval_density(const ModelSpace& space, double x) {
  check_coordinate(space, x);
  return space.density(x);
}

double distance(const ModelSpace& space, double x, double y) {
  check_coordinate(space, x);
  check_coordinate(space, y);
  const double d = std::abs(x - y);
  if (!space.periodic()) return d;
  return std::min(d, space.domain_length() - d);
}

}  // namespace weyl1d
