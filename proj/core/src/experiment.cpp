#include "weyl1d/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "weyl1d/convexity.hpp"
#include "weyl1d/fixtures.hpp"
#include "weyl1d/measure.hpp"
#include "weyl1d/spectrum_cache.hpp"

namespace weyl1d {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorCode::ConfigParse, msg); }

// Strict view of one JSON object: every key must be consumed before finish().
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) config_error(where_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  template <class T>
  std::optional<T> opt(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return convert<T>(key, raw(key));
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    auto v = opt<T>(key);
    return v ? *v : fallback;
  }

  template <class T>
  T req(const std::string& key) {
    if (!has(key)) config_error("missing key '" + key + "' in " + where_);
    return *opt<T>(key);
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) config_error("unknown key '" + it.key() + "' in " + where_);
    }
  }

 private:
  template <class T>
  T convert(const std::string& key, const json& v) const {
    const std::string where = "key '" + key + "' in " + where_;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) config_error(where + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) config_error(where + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        config_error(where + ": expected a nonnegative integer");
      }
      return static_cast<T>(v.get<unsigned long long>());
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) config_error(where + ": expected an integer");
      return v.get<int>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) config_error(where + ": expected a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) config_error(where + ": expected an array of numbers");
      std::vector<double> out;
      for (const auto& e : v) {
        if (!e.is_number()) config_error(where + ": expected an array of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    } else {
      static_assert(sizeof(T) == 0, "unsupported config type");
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

SampledDensity read_sampled_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::Io, "cannot open sampled density file " + file.string());
  SampledDensity s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x = 0.0;
    double h = 0.0;
    if (!(ss >> x >> h)) config_error(file.string() + ":" + std::to_string(lineno) + ": expected 'x,h'");
    s.grid.push_back(x);
    s.values.push_back(h);
  }
  return s;
}

// The sinpower family may carry its own N (exponent N - 1), which then also
// serves as the space's dimension bound unless one is given explicitly.
DensityFamily parse_density(const json& j, const fs::path& base, std::optional<double>& family_N) {
  Reader r(j, "space.density");
  const auto family = r.req<std::string>("family");
  DensityFamily out;
  if (family == "constant") {
    out = ConstantDensity{r.get<double>("value", 1.0)};
  } else if (family == "sinpower") {
    family_N = r.opt<double>("N");
    const auto exponent = r.opt<double>("exponent");
    if (family_N.has_value() == exponent.has_value()) {
      config_error("space.density: sinpower needs exactly one of 'N' or 'exponent'");
    }
    out = SinPower{exponent ? *exponent : *family_N - 1.0, r.get<double>("scale", 1.0)};
  } else if (family == "exp_neg_f") {
    auto coeffs = r.req<std::vector<double>>("polynomial");
    out = ExpNegF{FunctionSpec::polynomial(std::move(coeffs))};
  } else if (family == "sampled") {
    if (r.has("file")) {
      fs::path p = r.req<std::string>("file");
      if (p.is_relative()) p = base / p;
      out = read_sampled_file(p);
    } else {
      out = SampledDensity{r.req<std::vector<double>>("grid"), r.req<std::vector<double>>("values")};
    }
  } else {
    config_error("key 'family' in space.density: unknown family '" + family + "'");
  }
  r.finish();
  return out;
}

void parse_space(const json& j, const fs::path& base, ExperimentConfig& cfg) {
  Reader r(j, "space");
  if (r.has("fixture")) {
    cfg.fixture = r.req<std::string>("fixture");
    r.finish();
    const auto names = fixture_names();
    if (std::find(names.begin(), names.end(), cfg.fixture) == names.end()) {
      config_error("key 'fixture' in space: unknown fixture '" + cfg.fixture + "'");
    }
    cfg.space = make_fixture(cfg.fixture).space;
    return;
  }
  const auto kind_name = r.req<std::string>("kind");
  SpaceKind kind;
  if (kind_name == "interval") {
    kind = Interval{r.req<double>("length")};
  } else if (kind_name == "circle") {
    kind = Circle{r.req<double>("radius")};
  } else {
    config_error("key 'kind' in space: expected 'interval' or 'circle'");
  }
  if (!r.has("density")) config_error("missing key 'density' in space");
  std::optional<double> family_N;
  DensityFamily family = parse_density(r.raw("density"), base, family_N);
  const double N = r.get<double>("N", family_N.value_or(2.0));
  const double K = r.get<double>("K", -(N - 1.0));
  const double multiplier = r.get<double>("multiplier", 1.0);
  const bool normalize = r.get<bool>("normalize", false);
  const bool validate = r.get<bool>("validate", false);
  r.finish();
  cfg.space = make_space(kind, DensitySpec{std::move(family), CurvatureDimension(K, N), multiplier, normalize},
                         validate);
}

MeshParameters parse_mesh(Reader& r) {
  MeshParameters m;
  m.elements = r.get<std::size_t>("elements", m.elements);
  if (auto g = r.opt<std::string>("grading")) {
    if (*g == "uniform") {
      m.grading = Grading::Uniform;
    } else if (*g == "boundary-graded") {
      m.grading = Grading::BoundaryGraded;
    } else {
      config_error("key 'grading': expected 'uniform' or 'boundary-graded'");
    }
  }
  m.strength = r.get<double>("strength", m.strength);
  m.quadrature_order = r.get<std::size_t>("quadrature_order", m.quadrature_order);
  m.count = r.opt<std::size_t>("count");
  return m;
}

TaskParameters default_parameters(const std::string& task) {
  if (task == "spectrum") return SpectrumTask{};
  if (task == "weyl") return WeylTask{};
  if (task == "ratio-integral") return RatioIntegralTask{};
  if (task == "convexity-check") return ConvexityTask{};
  if (task == "heat-trace") return HeatTraceTask{};
  if (task == "abelian") return AbelianTask{};
  config_error("key 'task': unknown task '" + task + "'");
}

TaskParameters parse_parameters(const std::string& task, const json* j) {
  TaskParameters params = default_parameters(task);
  if (j == nullptr) return params;
  Reader r(*j, "task_parameters");
  std::visit(
      [&r](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SpectrumTask>) {
          p.mesh = parse_mesh(r);
          p.tolerance = r.get<double>("tolerance", p.tolerance);
          p.check_count = r.get<std::size_t>("check_count", p.check_count);
        } else if constexpr (std::is_same_v<T, WeylTask>) {
          p.mesh = parse_mesh(r);
          p.tolerance = r.get<double>("tolerance", p.tolerance);
          p.points = r.get<std::size_t>("points", p.points);
          p.classifier.alpha_grid = r.get<std::vector<double>>("alpha_grid", p.classifier.alpha_grid);
          p.classifier.exponent_tolerance = r.get<double>("exponent_tolerance", p.classifier.exponent_tolerance);
        } else if constexpr (std::is_same_v<T, RatioIntegralTask>) {
          p.r_max = r.opt<double>("r_max");
          p.r_min = r.opt<double>("r_min");
          p.steps = r.get<std::size_t>("steps", p.steps);
          p.quadrature_points = r.get<std::size_t>("quadrature_points", p.quadrature_points);
          p.tolerance = r.get<double>("tolerance", p.tolerance);
        } else if constexpr (std::is_same_v<T, ConvexityTask>) {
          p.grid_resolution = r.get<std::size_t>("grid_resolution", p.grid_resolution);
          p.random_triples = r.get<std::size_t>("random_triples", p.random_triples);
          p.relative_tolerance = r.get<double>("relative_tolerance", p.relative_tolerance);
        } else if constexpr (std::is_same_v<T, HeatTraceTask>) {
          p.mesh = parse_mesh(r);
          p.t_min = r.opt<double>("t_min");
          p.t_max = r.opt<double>("t_max");
          p.t_points = r.get<std::size_t>("t_points", p.t_points);
          p.k = r.get<double>("k", p.k);
          p.tolerance = r.get<double>("tolerance", p.tolerance);
          p.tail_model = r.get<bool>("tail_model", p.tail_model);
        } else if constexpr (std::is_same_v<T, AbelianTask>) {
          p.mesh = parse_mesh(r);
          p.measure = r.get<std::string>("measure", p.measure);
          p.count = r.get<std::size_t>("count", p.count);
          p.gamma = r.opt<double>("gamma");
          p.C = r.opt<double>("C");
          if (auto s = r.opt<std::string>("slow_variation")) {
            if (*s == "none") {
              p.slow = SlowVariation::None;
            } else if (*s == "log") {
              p.slow = SlowVariation::Log;
            } else {
              config_error("key 'slow_variation' in task_parameters: expected 'none' or 'log'");
            }
          }
          p.log_constant = r.get<double>("log_constant", p.log_constant);
          p.a_min = r.opt<double>("a_min");
          p.a_max = r.opt<double>("a_max");
          p.a_points = r.get<std::size_t>("a_points", p.a_points);
          p.t_min = r.opt<double>("t_min");
          p.t_max = r.opt<double>("t_max");
          p.t_points = r.get<std::size_t>("t_points", p.t_points);
          p.tolerance = r.get<double>("tolerance", p.tolerance);
          p.a_tolerance = r.get<double>("a_tolerance", p.a_tolerance);
        }
      },
      params);
  r.finish();
  return params;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

// Artifacts collected during a run and written together at the end.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  std::string& file(const std::string& relative) { return files_[relative]; }

  void commit() const {
    std::error_code ec;
    fs::create_directories(dir_ / "plotdata", ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + (dir_ / "plotdata").string() + ": " + ec.message());
    for (const auto& [name, content] : files_) {
      const fs::path target = dir_ / name;
      fs::path tmp = target;
      tmp += ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
        out << content;
        if (!out) fail(ErrorCode::Io, "short write to " + tmp.string());
      }
      fs::rename(tmp, target, ec);
      if (ec) fail(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
    }
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> files_;
};

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string line;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) line += ',';
    line += c;
    first = false;
  }
  return line + '\n';
}

std::string dat_row(double x, double y) { return format_real(x) + ' ' + format_real(y) + '\n'; }

Spectrum solve(const ModelSpace& space, const MeshParameters& mesh) {
  const Discretization disc =
      make_discretization(space, mesh.elements, mesh.grading, mesh.strength, mesh.quadrature_order);
  return cached_eigen_solve(space, disc, mesh.count.value_or(mesh.elements / 4 + 64));
}

const ModelSpace& need_space(const ExperimentConfig& cfg) {
  if (!cfg.space) fail(ErrorCode::InvalidParameter, "task '" + cfg.task + "' needs a space");
  return *cfg.space;
}

struct Outcome {
  bool passed = false;
  std::string summary;
};

Outcome run_spectrum(const ExperimentConfig& cfg, const SpectrumTask& p, double tscale, Artifacts& art,
                     ojson& verdict) {
  const ModelSpace& space = need_space(cfg);
  const Spectrum spec = solve(space, p.mesh);
  std::string& csv = art.file("results.csv");
  std::string& dat = art.file("plotdata/eigenvalues.dat");
  csv = csv_row({"index", "eigenvalue", "resolved"});
  const auto all = spec.computed();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const bool resolved = i < spec.resolved_count();
    csv += csv_row({std::to_string(i), format_real(all[i]), resolved ? "true" : "false"});
    if (resolved) dat += dat_row(static_cast<double>(i), all[i]);
  }
  verdict["resolved_count"] = spec.resolved_count();
  verdict["computed_count"] = all.size();
  verdict["mesh_size"] = spec.mesh_size();
  verdict["trusted_limit"] = spec.trusted_limit();

  const double zero = spec.eigenvalues().empty() ? 1.0 : spec.eigenvalues()[0];
  bool passed = std::abs(zero) <= 1e-8;
  verdict["lambda0"] = zero;
  std::string summary = "resolved " + std::to_string(spec.resolved_count()) + " eigenvalues";
  if (!cfg.fixture.empty()) {
    const Fixture fx = make_fixture(cfg.fixture);
    if (fx.exact_eigenvalue) {
      double worst = 0.0;
      const std::size_t n = std::min(p.check_count + 1, spec.resolved_count());
      for (std::size_t i = 1; i < n; ++i) {
        const double exact = fx.exact_eigenvalue(i);
        worst = std::max(worst, std::abs(spec.eigenvalues()[i] / exact - 1.0));
      }
      const double tol = p.tolerance * tscale;
      verdict["eigenvalue_law"] = fx.eigenvalue_law;
      verdict["max_relative_error"] = worst;
      verdict["tolerance"] = tol;
      passed = passed && worst <= tol;
      summary += ", max relative error " + format_real(worst) + " against " + fx.eigenvalue_law;
    }
  }
  return {passed, summary};
}

Outcome run_weyl(const ExperimentConfig& cfg, const WeylTask& p, double tscale, Artifacts& art, ojson& verdict) {
  const ModelSpace& space = need_space(cfg);
  const Spectrum spec = solve(space, p.mesh);
  const WeylTailCheck tail = weyl_tail_check(spec, p.tolerance * tscale, p.points);
  ClassifierOptions copt = p.classifier;
  copt.exponent_tolerance *= tscale;
  const DimensionVerdict dim = classify_dimension(spec, copt);

  std::string& csv = art.file("results.csv");
  std::string& dat = art.file("plotdata/weyl_ratio.dat");
  csv = csv_row({"lambda", "N", "ratio", "target"});
  for (const RatioPoint& pt : tail.curve) {
    csv += csv_row({format_real(pt.lambda), std::to_string(counting_function(spec, pt.lambda)),
                    format_real(pt.ratio), format_real(tail.target)});
    dat += dat_row(pt.lambda, pt.ratio);
  }
  verdict["target"] = tail.target;
  verdict["measured"] = tail.measured;
  verdict["max_relative_error"] = tail.max_relative_error;
  verdict["tolerance"] = p.tolerance * tscale;
  verdict["window"] = {tail.lambda_lo, tail.lambda_hi};
  verdict["resolved_count"] = spec.resolved_count();
  ojson c;
  c["is_one_dimensional"] = dim.is_one_dimensional;
  c["exponent"] = dim.fit.exponent;
  c["constant"] = dim.fit.constant;
  c["residual"] = dim.fit.residual;
  c["log_correction_detected"] = dim.fit.log_correction_detected;
  ojson alphas = ojson::array();
  for (const AlphaDecay& a : dim.alphas) {
    alphas.push_back({{"alpha", a.alpha}, {"slope", a.slope}, {"decay_factor", a.decay_factor}, {"ok", a.ok}});
  }
  c["alphas"] = alphas;
  verdict["classifier"] = c;
  const bool passed = tail.ok && dim.is_one_dimensional;
  return {passed, "tail ratio " + format_real(tail.measured) + " vs target " + format_real(tail.target) +
                      ", exponent " + format_real(dim.fit.exponent)};
}

Outcome run_ratio(const ExperimentConfig& cfg, const RatioIntegralTask& p, double tscale, unsigned threads,
                  Artifacts& art, ojson& verdict) {
  const ModelSpace& space = need_space(cfg);
  const double d = space.diameter();
  const RatioProfile prof =
      ratio_profile(space, p.r_max.value_or(0.1 * d), p.r_min.value_or(1e-4 * d), p.steps, threads,
                    p.quadrature_points);
  std::string& csv = art.file("results.csv");
  std::string& dat = art.file("plotdata/ratio_integral.dat");
  csv = csv_row({"r", "integral", "extrapolated_limit", "target", "abs_error"});
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    csv += csv_row({format_real(prof.radii[i]), format_real(prof.integrals[i]), format_real(prof.extrapolated_limit),
                    format_real(prof.target), format_real(std::abs(prof.integrals[i] - prof.target))});
    dat += dat_row(prof.radii[i], prof.integrals[i]);
  }
  const double rel = std::abs(prof.extrapolated_limit / prof.target - 1.0);
  const double tol = p.tolerance * tscale;
  verdict["target"] = prof.target;
  verdict["extrapolated_limit"] = prof.extrapolated_limit;
  verdict["extrapolation_error"] = prof.extrapolation_error;
  verdict["relative_error"] = rel;
  verdict["tolerance"] = tol;
  return {rel <= tol, "extrapolated " + format_real(prof.extrapolated_limit) + " vs " + format_real(prof.target)};
}

Outcome run_convexity(const ExperimentConfig& cfg, const ConvexityTask& p, double tscale, unsigned threads,
                      Artifacts& art, ojson& verdict) {
  const ModelSpace& space = need_space(cfg);
  ConvexityOptions opt;
  opt.grid_resolution = p.grid_resolution;
  opt.random_triples = p.random_triples;
  opt.seed = cfg.seed;
  opt.relative_tolerance = p.relative_tolerance * tscale;
  opt.threads = threads;
  const ConvexityReport rep = check_density_convexity(space, opt);
  const ConvexityWitness w = rep.witness.value_or(ConvexityWitness{});
  std::string& csv = art.file("results.csv");
  csv = csv_row({"passed", "worst_margin", "tolerance", "triples_tested", "witness_y0", "witness_y1", "witness_t"});
  csv += csv_row({rep.passed ? "true" : "false", format_real(rep.worst_margin), format_real(rep.tolerance),
                  std::to_string(rep.triples_tested), format_real(w.y0), format_real(w.y1), format_real(w.t)});
  std::string& dat = art.file("plotdata/density.dat");
  const double L = space.domain_length();
  const std::size_t n = 256;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = space.periodic() ? L * static_cast<double>(i) / n : L * static_cast<double>(i) / (n - 1);
    dat += dat_row(x, space.density(std::min(x, L)));
  }
  verdict["worst_margin"] = rep.worst_margin;
  verdict["tolerance"] = rep.tolerance;
  verdict["triples_tested"] = rep.triples_tested;
  if (rep.witness) verdict["witness"] = {{"y0", w.y0}, {"y1", w.y1}, {"t", w.t}};
  return {rep.passed, rep.passed ? "density passes the convexity sampling"
                                 : "convexity violated at y0=" + format_real(w.y0) + " y1=" + format_real(w.y1) +
                                       " t=" + format_real(w.t)};
}

Outcome run_heat(const ExperimentConfig& cfg, const HeatTraceTask& p, double tscale, Artifacts& art,
                 ojson& verdict) {
  const ModelSpace& space = need_space(cfg);
  const Spectrum spec = solve(space, p.mesh);
  const double d2 = space.diameter() * space.diameter();
  auto grid = geometric_grid(p.t_min.value_or(1e-3 * d2), p.t_max.value_or(1e-1 * d2), p.t_points);
  std::reverse(grid.begin(), grid.end());
  const HeatTraceLimit lim = heat_trace_limit(spec, p.k, grid, p.tolerance * tscale, p.tail_model);
  std::string& csv = art.file("results.csv");
  std::string& dat = art.file("plotdata/heat_trace.dat");
  csv = csv_row({"t", "heat_trace", "scaled_trace", "lower_bound"});
  for (std::size_t i = 0; i < lim.t.size(); ++i) {
    const double z = lim.scaled_trace[i] / std::pow(lim.t[i], 0.5 * p.k);
    csv += csv_row({format_real(lim.t[i]), format_real(z), format_real(lim.scaled_trace[i]),
                    format_real(lim.lower_bound)});
    dat += dat_row(lim.t[i], lim.scaled_trace[i]);
  }
  verdict["liminf_estimate"] = lim.liminf_estimate;
  verdict["argmin_t"] = lim.argmin_t;
  verdict["lower_bound"] = lim.lower_bound;
  verdict["tolerance"] = p.tolerance * tscale;
  return {lim.ok, "liminf " + format_real(lim.liminf_estimate) + " vs bound " + format_real(lim.lower_bound)};
}

Outcome run_abelian(const ExperimentConfig& cfg, const AbelianTask& p, double tscale, Artifacts& art,
                    ojson& verdict) {
  SyntheticMeasure nu;
  const bool linear = p.measure == "lebesgue" || p.measure == "lambda_log_lambda";
  const double gamma = p.gamma.value_or(linear ? 1.0 : 0.5);
  double C = 1.0;
  const SlowVariation slow =
      p.slow.value_or(p.measure == "lambda_log_lambda" ? SlowVariation::Log : SlowVariation::None);
  double known = 0.0;
  if (p.measure == "lebesgue") {
    nu = LebesgueMeasure{};
    known = 1e6;
  } else if (p.measure == "squares") {
    auto m = square_atoms(p.count);
    known = m.known_up_to;
    nu = std::move(m);
  } else if (p.measure == "lambda_log_lambda") {
    auto m = lambda_log_lambda_atoms(p.count, p.log_constant);
    known = m.known_up_to;
    nu = std::move(m);
    C = p.log_constant;
  } else if (p.measure == "spectrum") {
    const Spectrum spec = solve(need_space(cfg), p.mesh);
    auto m = atoms_from_spectrum(spec);
    known = m.known_up_to;
    nu = std::move(m);
    C = weyl_constant(spec);
  } else {
    config_error("key 'measure' in task_parameters: unknown measure '" + p.measure + "'");
  }
  C = p.C.value_or(C);
  const auto a_grid = geometric_grid(p.a_min.value_or(1e-2 * known), p.a_max.value_or(known), p.a_points);
  auto t_grid = geometric_grid(p.t_min.value_or(p.measure == "lebesgue" ? 1e-4 : 40.0 / known),
                               p.t_max.value_or(p.measure == "lebesgue" ? 1.0 : 4000.0 / known), p.t_points);
  std::reverse(t_grid.begin(), t_grid.end());
  AbelianOptions opt;
  opt.slow = slow;
  opt.tolerance = p.tolerance * tscale;
  opt.a_tolerance = p.a_tolerance * tscale;
  const AbelianResult res = abelian_check(nu, gamma, C, a_grid, t_grid, opt);

  std::string& csv = art.file("results.csv");
  csv = csv_row({"side", "x", "value", "target"});
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    csv += csv_row({"a", format_real(a_grid[i]), format_real(res.a_ratios[i]), format_real(C)});
    art.file("plotdata/abelian_a.dat") += dat_row(a_grid[i], res.a_ratios[i]);
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    csv += csv_row({"t", format_real(t_grid[i]), format_real(res.t_values[i]), format_real(res.rhs)});
    art.file("plotdata/abelian_t.dat") += dat_row(t_grid[i], res.t_values[i]);
  }
  verdict["measure"] = p.measure;
  verdict["gamma"] = gamma;
  verdict["C"] = C;
  verdict["rhs"] = res.rhs;
  verdict["lhs_limit"] = res.lhs_limit;
  verdict["relative_error"] = res.relative_error;
  verdict["tolerance"] = opt.tolerance;
  return {res.ok, "lhs " + format_real(res.lhs_limit) + " vs C Gamma(gamma+1) = " + format_real(res.rhs)};
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"spectrum",        "weyl",       "ratio-integral",
                                              "convexity-check", "heat-trace", "abelian"};
  return names;
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  Reader r(j, "config");
  ExperimentConfig cfg;
  cfg.schema_version = r.req<int>("schema_version");
  if (cfg.schema_version != kSchemaVersion) {
    config_error("key 'schema_version': unsupported version " + std::to_string(cfg.schema_version));
  }
  cfg.task = r.req<std::string>("task");
  const json* params = r.has("task_parameters") ? &r.raw("task_parameters") : nullptr;
  cfg.parameters = parse_parameters(cfg.task, params);
  if (r.has("space")) parse_space(r.raw("space"), base_dir, cfg);
  fs::path out = r.get<std::string>("output", "out");
  cfg.output = out.is_relative() ? base_dir / out : out;
  cfg.seed = r.get<std::uint64_t>("seed", 0);
  r.finish();
  if (!cfg.space) {
    const bool synthetic = cfg.task == "abelian" && std::get<AbelianTask>(cfg.parameters).measure != "spectrum";
    if (!synthetic) config_error("missing key 'space' in config");
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::Io, "cannot open config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.has_parent_path() ? file.parent_path() : fs::path("."));
}

ExperimentConfig fixture_config(const std::string& task, const std::string& fixture) {
  ExperimentConfig cfg;
  cfg.task = task;
  cfg.parameters = default_parameters(task);
  if (!fixture.empty()) {
    cfg.fixture = fixture;
    cfg.space = make_fixture(fixture).space;
  }
  return cfg;
}

RunResult run(const ExperimentConfig& cfg, const RunOptions& options) {
  if (!(options.tolerance_scale > 0.0)) fail(ErrorCode::InvalidParameter, "tolerance scale must be positive");
  RunResult result;
  result.output_dir = options.output.value_or(cfg.output);
  Artifacts art(result.output_dir);
  ojson verdict;
  verdict["schema_version"] = kSchemaVersion;
  verdict["task"] = cfg.task;
  if (!cfg.fixture.empty()) verdict["fixture"] = cfg.fixture;
  if (cfg.space) verdict["space_fingerprint"] = hex64(cfg.space->fingerprint());
  verdict["seed"] = cfg.seed;
  verdict["tolerance_scale"] = options.tolerance_scale;

  const double ts = options.tolerance_scale;
  const unsigned threads = std::max(1u, options.threads);
  Outcome outcome;
  try {
    outcome = std::visit(
        [&](const auto& p) -> Outcome {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, SpectrumTask>) return run_spectrum(cfg, p, ts, art, verdict);
          if constexpr (std::is_same_v<T, WeylTask>) return run_weyl(cfg, p, ts, art, verdict);
          if constexpr (std::is_same_v<T, RatioIntegralTask>) return run_ratio(cfg, p, ts, threads, art, verdict);
          if constexpr (std::is_same_v<T, ConvexityTask>) return run_convexity(cfg, p, ts, threads, art, verdict);
          if constexpr (std::is_same_v<T, HeatTraceTask>) return run_heat(cfg, p, ts, art, verdict);
          if constexpr (std::is_same_v<T, AbelianTask>) return run_abelian(cfg, p, ts, art, verdict);
        },
        cfg.parameters);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    result.exit_code = exit_code_for(e.code());
    result.passed = false;
    result.summary = e.what();
    verdict["passed"] = false;
    verdict["exit_code"] = result.exit_code;
    verdict["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    result.verdict_json = verdict.dump(2) + '\n';
    art.file("verdict.json") = result.verdict_json;
    art.commit();
    return result;
  }
  result.passed = outcome.passed;
  result.exit_code = outcome.passed ? kExitPass : kExitTargetMiss;
  result.summary = outcome.summary;
  verdict["passed"] = result.passed;
  verdict["exit_code"] = result.exit_code;
  verdict["summary"] = result.summary;
  result.verdict_json = verdict.dump(2) + '\n';
  art.file("verdict.json") = result.verdict_json;
  art.commit();
  return result;
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigParse: return kExitError;
    case ErrorCode::Io: return 3;
    default: return 10 + static_cast<int>(code);
  }
}

std::string exit_code_help() {
  std::string s = "Exit codes:\n  0   all targets met\n  1   configuration or usage error\n"
                  "  2   a quantitative target was missed\n  3   I/O failure\n";
  for (int c = 0; c <= static_cast<int>(ErrorCode::InsufficientSpectrum); ++c) {
    const auto code = static_cast<ErrorCode>(c);
    s += "  " + std::to_string(exit_code_for(code)) + "  " + std::string(to_string(code)) + "\n";
  }
  return s;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string fixture_table() {
  std::ostringstream out;
  out << "name                     weyl_target  eigenvalue_law                   reference\n";
  for (const Fixture& f : list_fixtures()) {
    std::string law = f.eigenvalue_law.empty() ? "-" : f.eigenvalue_law;
    out << f.name << std::string(25 - std::min<std::size_t>(24, f.name.size()), ' ') << format_real(f.weyl_target)
        << std::string(13 - std::min<std::size_t>(12, format_real(f.weyl_target).size()), ' ') << law
        << std::string(33 - std::min<std::size_t>(32, law.size()), ' ') << f.reference_source << "\n"
        << "    " << f.description << "\n";
  }
  return out.str();
}

}  // namespace weyl1d
