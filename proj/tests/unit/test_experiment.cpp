#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "weyl1d/error.hpp"
#include "weyl1d/experiment.hpp"
#include "weyl1d/fixtures.hpp"

using namespace weyl1d;
namespace fs = std::filesystem;

namespace {

const fs::path kData = WEYL1D_TEST_DATA_DIR;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / "weyl1d_experiment_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string parse_error(const std::string& text) {
  try {
    parse_config(text, ".");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParse) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "expected ConfigParse";
  return {};
}

}  // namespace

TEST(ParseConfig, UnknownKeysAreNamed) {
  EXPECT_NE(parse_error(R"({"schema_version":1,"task":"spectrum","space":{"fixture":"flat_pi"},"bogus":1})")
                .find("'bogus'"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"schema_version":1,"task":"ratio-integral","space":{"fixture":"flat_pi"},
                            "task_parameters":{"stepz":3}})")
                .find("'stepz'"),
            std::string::npos);
  EXPECT_NE(parse_error(R"({"schema_version":1,"task":"spectrum",
                            "space":{"kind":"interval","length":3,"density":{"family":"constant","valu":1}}})")
                .find("'valu'"),
            std::string::npos);
}

TEST(ParseConfig, TypeErrorsAreNamed) {
  const auto msg = parse_error(
      R"({"schema_version":1,"task":"ratio-integral","space":{"fixture":"flat_pi"},"task_parameters":{"steps":"x"}})");
  EXPECT_NE(msg.find("'steps'"), std::string::npos);
}

TEST(ParseConfig, MissingAndUnknownValues) {
  EXPECT_NE(parse_error(R"({"task":"spectrum"})").find("schema_version"), std::string::npos);
  EXPECT_NE(parse_error(R"({"schema_version":2,"task":"spectrum"})").find("schema_version"), std::string::npos);
  EXPECT_NE(parse_error(R"({"schema_version":1,"task":"nope"})").find("nope"), std::string::npos);
  EXPECT_NE(parse_error(R"({"schema_version":1,"task":"spectrum"})").find("space"), std::string::npos);
  EXPECT_NE(parse_error(R"({"schema_version":1,"task":"spectrum","space":{"fixture":"nope"}})").find("nope"),
            std::string::npos);
  EXPECT_NE(parse_error("{not json").find("malformed"), std::string::npos);
}

TEST(ParseConfig, FullSpaceDescription) {
  const auto cfg = parse_config(R"({"schema_version":1,"task":"spectrum",
      "space":{"kind":"interval","length":3.141592653589793,"density":{"family":"sinpower","N":3}},
      "task_parameters":{"elements":100,"grading":"uniform","count":20},"seed":5,"output":"x"})",
                                "/tmp/base");
  ASSERT_TRUE(cfg.space.has_value());
  EXPECT_EQ(cfg.space->density_spec().cd.N, 3.0);
  EXPECT_EQ(cfg.space->density_spec().cd.K, -2.0);
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.output, fs::path("/tmp/base/x"));
  const auto& p = std::get<SpectrumTask>(cfg.parameters);
  EXPECT_EQ(p.mesh.elements, 100u);
  EXPECT_EQ(p.mesh.grading, Grading::Uniform);
  EXPECT_EQ(p.mesh.count, 20u);
}

TEST(ParseConfig, SyntheticAbelianNeedsNoSpace) {
  const auto cfg = parse_config(R"({"schema_version":1,"task":"abelian","task_parameters":{"measure":"lebesgue"}})", ".");
  EXPECT_FALSE(cfg.space.has_value());
}

TEST(ParseConfig, MalformedDataFile) {
  try {
    load_config(kData / "malformed.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParse);
    EXPECT_NE(std::string(e.what()).find("'stepz'"), std::string::npos);
    EXPECT_EQ(exit_code_for(e.code()), 1);
  }
}

TEST(Run, RatioIntegralWritesArtifacts) {
  const auto out = scratch("ratio");
  auto cfg = load_config(kData / "ratio_sinpower.json");
  const auto res = run(cfg, {.output = out});
  EXPECT_TRUE(res.passed) << res.summary;
  EXPECT_EQ(res.exit_code, 0);
  ASSERT_TRUE(fs::exists(out / "results.csv"));
  ASSERT_TRUE(fs::exists(out / "verdict.json"));
  ASSERT_TRUE(fs::exists(out / "plotdata" / "ratio_integral.dat"));
  const auto csv = slurp(out / "results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,integral,extrapolated_limit,target,abs_error");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 9u);
  const auto v = nlohmann::json::parse(slurp(out / "verdict.json"));
  EXPECT_EQ(v["passed"], true);
  EXPECT_EQ(v["seed"], 17);
  for (const auto& e : fs::directory_iterator(out)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Run, ByteIdenticalReruns) {
  const auto cfg = load_config(kData / "ratio_sinpower.json");
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  run(cfg, {.output = a, .threads = 1});
  run(cfg, {.output = b, .threads = 3});
  for (const char* f : {"results.csv", "verdict.json", "plotdata/ratio_integral.dat"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Run, NonConvexDensityMissesWithWitness) {
  const auto out = scratch("nonconvex");
  const auto cfg = load_config(kData / "nonconvex.json");
  const auto res = run(cfg, {.output = out});
  EXPECT_FALSE(res.passed);
  EXPECT_EQ(res.exit_code, kExitTargetMiss);
  const auto v = nlohmann::json::parse(res.verdict_json);
  ASSERT_TRUE(v.contains("witness"));
  EXPECT_LT(v["witness"]["y0"].get<double>(), v["witness"]["y1"].get<double>());
  EXPECT_LT(v["worst_margin"].get<double>(), 0.0);
}

TEST(Run, SpectrumOnFixtureChecksLaw) {
  auto cfg = fixture_config("spectrum", "sinpow_N3");
  std::get<SpectrumTask>(cfg.parameters).mesh.elements = 600;
  const auto out = scratch("spectrum");
  const auto res = run(cfg, {.output = out});
  EXPECT_TRUE(res.passed) << res.summary;
  const auto csv = slurp(out / "results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,eigenvalue,resolved");
  EXPECT_NE(csv.find(",false\n"), std::string::npos);
}

TEST(Run, AbelianSyntheticSuites) {
  for (const char* m : {"lebesgue", "squares", "lambda_log_lambda"}) {
    auto cfg = fixture_config("abelian", "");
    std::get<AbelianTask>(cfg.parameters).measure = m;
    const auto res = run(cfg, {.output = scratch(std::string("abelian_") + m)});
    EXPECT_TRUE(res.passed) << m << ": " << res.summary;
  }
}

TEST(Run, ModuleErrorsMapToExitCodes) {
  auto cfg = fixture_config("ratio-integral", "flat_pi");
  std::get<RatioIntegralTask>(cfg.parameters).steps = 1;
  const auto res = run(cfg, {.output = scratch("error")});
  EXPECT_EQ(res.exit_code, exit_code_for(ErrorCode::InvalidParameter));
  EXPECT_NE(res.verdict_json.find("InvalidParameter"), std::string::npos);
}

TEST(FormatReal, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(Fixtures, TableListsEveryFixture) {
  const auto t = fixture_table();
  for (const auto& n : fixture_names()) EXPECT_NE(t.find(n), std::string::npos) << n;
  EXPECT_THROW(make_fixture("nope"), Error);
}

TEST(ExitCodes, Distinct) {
  EXPECT_EQ(exit_code_for(ErrorCode::ConfigParse), 1);
  EXPECT_EQ(exit_code_for(ErrorCode::Io), 3);
  EXPECT_NE(exit_code_for(ErrorCode::SolverFailure), exit_code_for(ErrorCode::SingularMass));
  EXPECT_NE(exit_code_help().find("InsufficientSpectrum"), std::string::npos);
}
