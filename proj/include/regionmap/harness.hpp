#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "regionmap/hms.hpp"
#include "regionmap/localphase.hpp"
#include "regionmap/nea2.hpp"
#include "regionmap/regions.hpp"

namespace regionmap {

enum class Algorithm { hms, nea2 };

Algorithm parse_algorithm(std::string_view name);
const char* algorithm_name(Algorithm a);

struct ExperimentConfig {
  BenchmarkCase benchmark_case = BenchmarkCase::I;
  Algorithm algorithm = Algorithm::hms;
  std::uint64_t budget = 500;
  int repeats = 1;
  std::uint64_t seed = 1;
  std::vector<approx::Method> methods{approx::Method::kriging};
  double epsilon = 0.1;

  HmsConfig hms;
  Nea2Config nea2;
  MweaParams mwea;
  int hill_valley_points = 3;
  int resize_min = 10;
  int resize_max = 100;
  approx::GridSpec grid;
  /// 0 picks 0.05 in 2D and 0.1 otherwise.
  double grid_step = 0.0;
  /// 0.5 reads the coverage ellipse axes as full lengths.
  double ellipse_axis_scale = 1.0;
  int jobs = 1;
  bool write_surrogates = false;

  void validate() const;
  double resolved_grid_step(int dim) const;
  nlohmann::json to_json() const;
  /// Keys absent from `j` keep their current values; unknown keys are a ConfigError.
  void apply(const nlohmann::json& j);
};

struct MethodMetrics {
  /// Mean over the exact regions that received an approximation; NaN when
  /// none did.
  double mean_hausdorff = 0.0;
  /// Per exact region, against the union of the non-empty approximations
  /// paired with it; +inf marks a missed region.
  std::vector<double> hausdorff;
  /// Per local cluster: exact region nearest to its centroid.
  std::vector<int> paired_region;
  int empty = 0;
  int downgraded = 0;
  int failed = 0;
};

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::uint64_t global_evaluations = 0;
  std::uint64_t local_evaluations = 0;
  int raw_clusters = 0;
  int reduced_clusters = 0;
  int local_clusters = 0;
  /// NaN where the case has no such ground truth.
  double coverage = 0.0;
  double minima_coverage = 0.0;
  std::map<std::string, MethodMetrics> methods;
  std::vector<std::string> stop_reasons;
  std::vector<std::string> notes;
  double wall_seconds = 0.0;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
};

Stat summarize(const std::vector<double>& values);

struct RunReport {
  nlohmann::json config;
  std::vector<RunRecord> runs;
  std::map<std::string, Stat> aggregate;
  int excluded = 0;

  /// NaN metrics are skipped per metric; failed runs are excluded.
  void recompute_aggregate();
  nlohmann::json to_json() const;
  /// Throws ConfigError if the stored aggregate disagrees with the rows.
  static RunReport from_json(const nlohmann::json& j);
};

/// Everything one pipeline execution produced, including what only goes to
/// the data files.
struct RunArtifacts {
  RunRecord record;
  std::vector<Cluster> raw;
  std::vector<Cluster> reduced;
  std::vector<Cluster> local;
  struct Approximation {
    approx::Method method;
    int cluster = 0;
    RegionApproximation region;
    std::vector<Segment> isoline;
  };
  std::vector<Approximation> approximations;
  nlohmann::json trace;
};

/// Exact insensitivity regions on the metric grid: whole-domain components
/// for cases I-II, one component per minimum for case III. Cached per
/// (case, step).
const std::vector<PointCloud>& exact_regions(BenchmarkCase c, double grid_step);

RunArtifacts run_pipeline(const ExperimentConfig& config, std::uint64_t seed, int run_index = 0);

/// Repeats with seeds seed..seed+repeats-1 on up to config.jobs threads.
/// Writes the output files when `out_dir` is given.
/// `run_hook` is called with the run index before each run; a throw marks
/// that run failed.
RunReport run_experiment(const ExperimentConfig& config,
                         const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                         const std::function<void(int)>& run_hook = {});

/// metrics.csv: one row per run. The header always lists all three methods.
std::string metrics_csv(const RunReport& report);
std::string metrics_csv_header();

void write_run_files(const RunArtifacts& art, const ExperimentConfig& config,
                     const std::filesystem::path& dir);

}  // namespace regionmap
