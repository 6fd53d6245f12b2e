#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "weyl1d/convexity.hpp"
#include "weyl1d/error.hpp"
#include "weyl1d/geometry.hpp"
#include "weyl1d/harness.hpp"
#include "weyl1d/spectral.hpp"

namespace weyl1d {

inline constexpr int kSchemaVersion = 1;

struct MeshParameters {
  std::size_t elements = 4000;
  Grading grading = Grading::BoundaryGraded;
  double strength = 1.5;
  std::size_t quadrature_order = 8;
  /// Eigenvalues to compute; defaults to elements / 4 + 64.
  std::optional<std::size_t> count;
};

struct SpectrumTask {
  MeshParameters mesh;
  /// Relative tolerance against a known eigenvalue law, first `check_count` values.
  double tolerance = 1e-3;
  std::size_t check_count = 10;
};

struct WeylTask {
  MeshParameters mesh;
  double tolerance = 0.05;
  std::size_t points = 64;
  ClassifierOptions classifier;
};

struct RatioIntegralTask {
  std::optional<double> r_max;  // default 0.1 diam
  std::optional<double> r_min;  // default 1e-4 diam
  std::size_t steps = 11;
  std::size_t quadrature_points = 20;
  double tolerance = 1e-3;  // relative, extrapolated limit against H^1/2
};

struct ConvexityTask {
  std::size_t grid_resolution = 200;
  std::size_t random_triples = 0;
  double relative_tolerance = 1e-9;
};

struct HeatTraceTask {
  MeshParameters mesh;
  std::optional<double> t_min;  // default 1e-3 diam^2
  std::optional<double> t_max;  // default 1e-1 diam^2
  std::size_t t_points = 41;
  double k = 1.0;
  double tolerance = 0.02;
  bool tail_model = true;
};

struct AbelianTask {
  /// "lebesgue", "squares", "lambda_log_lambda" or "spectrum".
  std::string measure = "squares";
  std::size_t count = 20000;
  std::optional<double> gamma;  // 1 for lebesgue and lambda_log_lambda, else 1/2
  std::optional<double> C;      // defaults per measure
  /// Defaults to Log for lambda_log_lambda.
  std::optional<SlowVariation> slow;
  double log_constant = 1.0 / (4.0 * 3.14159265358979323846);
  std::optional<double> a_min;
  std::optional<double> a_max;
  std::size_t a_points = 20;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::size_t t_points = 20;
  double tolerance = 0.01;
  double a_tolerance = 0.05;
  MeshParameters mesh;
};

using TaskParameters =
    std::variant<SpectrumTask, WeylTask, RatioIntegralTask, ConvexityTask, HeatTraceTask, AbelianTask>;

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string task;
  /// Absent only for abelian runs on synthetic measures.
  std::optional<ModelSpace> space;
  /// Fixture name when the space came from one.
  std::string fixture;
  TaskParameters parameters;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;
};

/// Task names in CLI order.
const std::vector<std::string>& task_names();

/// Strict parse: unknown keys and wrong types raise ConfigParse naming the
/// key. Relative paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Config for `task` on a named fixture with default parameters.
ExperimentConfig fixture_config(const std::string& task, const std::string& fixture);

struct RunOptions {
  std::optional<std::filesystem::path> output;
  unsigned threads = 1;
  double tolerance_scale = 1.0;
};

struct RunResult {
  int exit_code = 0;
  bool passed = false;
  std::string summary;
  std::filesystem::path output_dir;
  std::string verdict_json;
};

/// Runs the task and writes results.csv, verdict.json and plotdata/*.dat,
/// each through a temporary file and a rename.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTargetMiss = 2;

/// 1 for ConfigParse, 3 for Io, 10 + code for the remaining module errors.
int exit_code_for(ErrorCode code) noexcept;
/// Table of exit codes for --help.
std::string exit_code_help();

/// Fixed 17-significant-digit formatting used in every CSV and .dat file.
std::string format_real(double v);

/// Plain-text fixture table with reference laws and Weyl targets.
std::string fixture_table();

}  // namespace weyl1d
