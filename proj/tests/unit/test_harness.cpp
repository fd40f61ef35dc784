#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "regionmap/harness.hpp"

using namespace regionmap;

TEST_CASE("summary statistics use the sample deviation") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.n == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(summarize({}).n == 0);
}

TEST_CASE("config apply and validation") {
  ExperimentConfig c;
  c.apply(nlohmann::json{{"case", "II"}, {"algorithm", "nea2"}, {"budget", 2000}, {"methods", {"h1", "kriging"}}});
  CHECK(c.benchmark_case == BenchmarkCase::II);
  CHECK(c.algorithm == Algorithm::nea2);
  CHECK(c.budget == 2000);
  CHECK(c.methods.size() == 2);
  CHECK_THROWS_AS(c.apply(nlohmann::json{{"bugdet", 5}}), ConfigError);
  ExperimentConfig round;
  round.apply(c.to_json());
  CHECK(round.to_json() == c.to_json());
  ExperimentConfig bad;
  bad.repeats = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(c.resolved_grid_step(2) == 0.05);
  CHECK(c.resolved_grid_step(4) == 0.1);
}

TEST_CASE("report round trip and aggregate check") {
  ExperimentConfig c;
  c.budget = 500;
  c.repeats = 2;
  c.methods = {approx::Method::kriging, approx::Method::L2};
  const auto report = run_experiment(c);
  REQUIRE(report.runs.size() == 2);
  const auto j = report.to_json();
  const auto back = RunReport::from_json(j);
  CHECK(back.to_json() == j);
  auto tampered = j;
  tampered["aggregate"]["raw_clusters"]["mean"] = 1e9;
  CHECK_THROWS_AS(RunReport::from_json(tampered), ConfigError);
}

TEST_CASE("pipeline is deterministic and budgets hold") {
  ExperimentConfig c;
  c.budget = 500;
  const auto a = run_pipeline(c, 3);
  const auto b = run_pipeline(c, 3);
  CHECK(a.record.global_evaluations <= 500);
  CHECK(a.record.raw_clusters == b.record.raw_clusters);
  CHECK(a.record.reduced_clusters <= a.record.raw_clusters);
  REQUIRE(a.local.size() == b.local.size());
  for (std::size_t i = 0; i < a.local.size(); ++i) CHECK(a.local[i].points.size() == b.local[i].points.size());
  CHECK(a.record.methods.at("kriging").mean_hausdorff == b.record.methods.at("kriging").mean_hausdorff);
}

TEST_CASE("failing runs are recorded, not fatal") {
  ExperimentConfig c;
  c.budget = 300;
  c.repeats = 2;
  c.methods = {};
  const auto report = run_experiment(c, std::nullopt, [](int run) {
    if (run == 1) throw Error("injected");
  });
  REQUIRE(report.runs.size() == 2);
  CHECK_FALSE(report.runs[0].failed);
  CHECK(report.runs[1].failed);
  CHECK(report.excluded == 1);
}

TEST_CASE("output files") {
  const auto dir = std::filesystem::temp_directory_path() / "regionmap_harness_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig c;
  c.budget = 500;
  run_experiment(c, dir);
  for (const char* f : {"report.json", "metrics.csv", "config.resolved.json", "exact-regions.dat"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream csv(dir / "metrics.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == metrics_csv_header());
  std::filesystem::remove_all(dir);
}
