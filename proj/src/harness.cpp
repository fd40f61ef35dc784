#include "regionmap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace regionmap {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kAllMethods[] = {"l2", "h1", "kriging"};

json vec(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

// Reject keys we do not know so typos in config files do not pass silently.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
void take(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

// NaN and infinities become null; null reads back as the given default.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double read_num(const json& j, double if_null) { return j.is_null() ? if_null : j.get<double>(); }

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "hms") return Algorithm::hms;
  if (name == "nea2") return Algorithm::nea2;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

const char* algorithm_name(Algorithm a) { return a == Algorithm::hms ? "hms" : "nea2"; }

// ---- configuration ---------------------------------------------------------

void ExperimentConfig::validate() const {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (budget == 0) throw ConfigError("budget must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (hill_valley_points < 1) throw ConfigError("hill_valley_points must be >= 1");
  if (resize_min < 1 || resize_min > resize_max) throw ConfigError("resize range must satisfy 1 <= min <= max");
  if (grid_step < 0.0) throw ConfigError("grid step must be >= 0");
  if (!(ellipse_axis_scale > 0.0)) throw ConfigError("ellipse_axis_scale must be positive");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  std::set<approx::Method> seen;
  for (auto m : methods) {
    if (!seen.insert(m).second) throw ConfigError("duplicate approximation method");
  }
  HmsConfig h = hms;
  h.budget = budget;
  h.validate();
  Nea2Config n = nea2;
  n.budget = budget;
  n.validate();
  mwea.validate();
  grid.validate();
}

double ExperimentConfig::resolved_grid_step(int dim) const {
  if (grid_step > 0.0) return grid_step;
  return dim == 2 ? 0.05 : 0.1;
}

json ExperimentConfig::to_json() const {
  json m = json::array();
  for (auto x : methods) m.push_back(approx::method_name(x));
  return {
      {"case", std::string(case_label(benchmark_case))},
      {"algorithm", algorithm_name(algorithm)},
      {"budget", budget},
      {"repeats", repeats},
      {"seed", seed},
      {"methods", m},
      {"epsilon", epsilon},
      {"hms",
       {{"metaepoch_length", hms.metaepoch_length},
        {"root",
         {{"population", hms.root.population},
          {"crossover", hms.root.crossover},
          {"mutation", hms.root.mutation},
          {"mutation_std", hms.root.mutation_std}}},
        {"sprout_min_distance", hms.sprout_min_distance},
        {"sprout_max_fitness", hms.sprout_max_fitness},
        {"leaf_sigma0", hms.leaf_sigma0},
        {"leaf_lambda", hms.leaf_lambda},
        {"stagnation_tol", hms.stagnation_tol},
        {"stagnation_window", hms.stagnation_window},
        {"sigma_warmup", hms.sigma_warmup}}},
      {"nea2",
       {{"nbc", {{"phi", nea2.nbc.phi}, {"b", nea2.nbc.b}, {"sample_size", nea2.nbc.sample_size}}},
        {"sigma0", nea2.sigma0},
        {"lambda", nea2.lambda},
        {"stagnation_tol", nea2.stagnation_tol},
        {"stagnation_window", nea2.stagnation_window}}},
      {"mwea", {{"epochs", mwea.epochs}, {"alpha", mwea.alpha}, {"fallback_std", mwea.fallback_std}}},
      {"hill_valley_points", hill_valley_points},
      {"resize", {{"min", resize_min}, {"max", resize_max}}},
      {"grid", {{"cells_per_axis", grid.cells_per_axis}, {"inflate", grid.inflate}, {"step", grid_step}}},
      {"ellipse_axis_scale", ellipse_axis_scale},
      {"jobs", jobs},
      {"write_surrogates", write_surrogates},
  };
}

void ExperimentConfig::apply(const json& j) {
  check_keys(j,
             {"case", "algorithm", "budget", "repeats", "seed", "methods", "epsilon", "hms", "nea2", "mwea",
              "hill_valley_points", "resize", "grid", "ellipse_axis_scale", "jobs", "write_surrogates"},
             "config");
  const std::string w = "config";
  try {
    if (j.contains("case")) benchmark_case = parse_case(j.at("case").get<std::string>());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config.case: ") + e.what());
  }
  if (j.contains("algorithm")) {
    if (!j.at("algorithm").is_string()) throw ConfigError("config.algorithm must be a string");
    algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  }
  take(j, "budget", budget, w);
  take(j, "repeats", repeats, w);
  take(j, "seed", seed, w);
  if (j.contains("methods")) {
    if (!j.at("methods").is_array()) throw ConfigError("config.methods must be a list");
    methods.clear();
    for (const auto& m : j.at("methods")) {
      if (!m.is_string()) throw ConfigError("config.methods entries must be strings");
      methods.push_back(approx::parse_method(m.get<std::string>()));
    }
  }
  take(j, "epsilon", epsilon, w);
  if (j.contains("hms")) {
    const json& h = j.at("hms");
    check_keys(h,
               {"metaepoch_length", "root", "sprout_min_distance", "sprout_max_fitness", "leaf_sigma0",
                "leaf_lambda", "stagnation_tol", "stagnation_window", "sigma_warmup"},
               "config.hms");
    take(h, "metaepoch_length", hms.metaepoch_length, "hms");
    if (h.contains("root")) {
      const json& r = h.at("root");
      check_keys(r, {"population", "crossover", "mutation", "mutation_std"}, "config.hms.root");
      take(r, "population", hms.root.population, "hms.root");
      take(r, "crossover", hms.root.crossover, "hms.root");
      take(r, "mutation", hms.root.mutation, "hms.root");
      take(r, "mutation_std", hms.root.mutation_std, "hms.root");
    }
    take(h, "sprout_min_distance", hms.sprout_min_distance, "hms");
    take(h, "sprout_max_fitness", hms.sprout_max_fitness, "hms");
    take(h, "leaf_sigma0", hms.leaf_sigma0, "hms");
    take(h, "leaf_lambda", hms.leaf_lambda, "hms");
    take(h, "stagnation_tol", hms.stagnation_tol, "hms");
    take(h, "stagnation_window", hms.stagnation_window, "hms");
    take(h, "sigma_warmup", hms.sigma_warmup, "hms");
  }
  if (j.contains("nea2")) {
    const json& n = j.at("nea2");
    check_keys(n, {"nbc", "sigma0", "lambda", "stagnation_tol", "stagnation_window"}, "config.nea2");
    if (n.contains("nbc")) {
      const json& b = n.at("nbc");
      check_keys(b, {"phi", "b", "sample_size"}, "config.nea2.nbc");
      take(b, "phi", nea2.nbc.phi, "nea2.nbc");
      take(b, "b", nea2.nbc.b, "nea2.nbc");
      take(b, "sample_size", nea2.nbc.sample_size, "nea2.nbc");
    }
    take(n, "sigma0", nea2.sigma0, "nea2");
    take(n, "lambda", nea2.lambda, "nea2");
    take(n, "stagnation_tol", nea2.stagnation_tol, "nea2");
    take(n, "stagnation_window", nea2.stagnation_window, "nea2");
  }
  if (j.contains("mwea")) {
    const json& m = j.at("mwea");
    check_keys(m, {"epochs", "alpha", "fallback_std"}, "config.mwea");
    take(m, "epochs", mwea.epochs, "mwea");
    take(m, "alpha", mwea.alpha, "mwea");
    take(m, "fallback_std", mwea.fallback_std, "mwea");
  }
  take(j, "hill_valley_points", hill_valley_points, w);
  if (j.contains("resize")) {
    const json& r = j.at("resize");
    check_keys(r, {"min", "max"}, "config.resize");
    take(r, "min", resize_min, "resize");
    take(r, "max", resize_max, "resize");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, {"cells_per_axis", "inflate", "step"}, "config.grid");
    take(g, "cells_per_axis", grid.cells_per_axis, "grid");
    take(g, "inflate", grid.inflate, "grid");
    take(g, "step", grid_step, "grid");
  }
  take(j, "ellipse_axis_scale", ellipse_axis_scale, w);
  take(j, "jobs", jobs, w);
  take(j, "write_surrogates", write_surrogates, w);
}

// ---- statistics and reports ------------------------------------------------

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) {
    s.mean = kNaN;
    s.std = kNaN;
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = s.n > 1 ? std::sqrt(sq / (s.n - 1)) : 0.0;
  return s;
}

namespace {

std::vector<std::pair<std::string, double>> row_metrics(const RunRecord& r) {
  std::vector<std::pair<std::string, double>> m = {
      {"global_evaluations", static_cast<double>(r.global_evaluations)},
      {"local_evaluations", static_cast<double>(r.local_evaluations)},
      {"raw_clusters", static_cast<double>(r.raw_clusters)},
      {"reduced_clusters", static_cast<double>(r.reduced_clusters)},
      {"local_clusters", static_cast<double>(r.local_clusters)},
      {"coverage", r.coverage},
      {"minima_coverage", r.minima_coverage},
  };
  for (const auto& [name, mm] : r.methods) m.emplace_back("hausdorff_" + name, mm.mean_hausdorff);
  return m;
}

json record_json(const RunRecord& r) {
  json methods = json::object();
  for (const auto& [name, m] : r.methods) {
    json h = json::array();
    for (double v : m.hausdorff) h.push_back(num(v));
    methods[name] = {{"mean_hausdorff", num(m.mean_hausdorff)},
                     {"hausdorff", h},
                     {"paired_region", m.paired_region},
                     {"empty", m.empty},
                     {"downgraded", m.downgraded},
                     {"failed", m.failed}};
  }
  return {{"run", r.run},
          {"seed", r.seed},
          {"failed", r.failed},
          {"error", r.error},
          {"global_evaluations", r.global_evaluations},
          {"local_evaluations", r.local_evaluations},
          {"raw_clusters", r.raw_clusters},
          {"reduced_clusters", r.reduced_clusters},
          {"local_clusters", r.local_clusters},
          {"coverage", num(r.coverage)},
          {"minima_coverage", num(r.minima_coverage)},
          {"methods", methods},
          {"stop_reasons", r.stop_reasons},
          {"notes", r.notes},
          {"wall_seconds", r.wall_seconds}};
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.run = j.at("run").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.failed = j.at("failed").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.global_evaluations = j.at("global_evaluations").get<std::uint64_t>();
  r.local_evaluations = j.at("local_evaluations").get<std::uint64_t>();
  r.raw_clusters = j.at("raw_clusters").get<int>();
  r.reduced_clusters = j.at("reduced_clusters").get<int>();
  r.local_clusters = j.at("local_clusters").get<int>();
  r.coverage = read_num(j.at("coverage"), kNaN);
  r.minima_coverage = read_num(j.at("minima_coverage"), kNaN);
  for (auto it = j.at("methods").begin(); it != j.at("methods").end(); ++it) {
    MethodMetrics m;
    const json& v = it.value();
    m.mean_hausdorff = read_num(v.at("mean_hausdorff"), kNaN);
    for (const auto& h : v.at("hausdorff")) m.hausdorff.push_back(read_num(h, kInf));
    m.paired_region = v.at("paired_region").get<std::vector<int>>();
    m.empty = v.at("empty").get<int>();
    m.downgraded = v.at("downgraded").get<int>();
    m.failed = v.at("failed").get<int>();
    r.methods[it.key()] = std::move(m);
  }
  r.stop_reasons = j.at("stop_reasons").get<std::vector<std::string>>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

}  // namespace

void RunReport::recompute_aggregate() {
  std::map<std::string, std::vector<double>> columns;
  excluded = 0;
  for (const auto& r : runs) {
    if (r.failed) {
      ++excluded;
      continue;
    }
    for (const auto& [name, v] : row_metrics(r)) {
      auto& col = columns[name];
      if (std::isfinite(v)) col.push_back(v);
    }
  }
  aggregate.clear();
  for (const auto& [name, col] : columns) aggregate[name] = summarize(col);
}

json RunReport::to_json() const {
  json runs_j = json::array();
  for (const auto& r : runs) runs_j.push_back(record_json(r));
  json agg = json::object();
  for (const auto& [name, s] : aggregate) agg[name] = {{"mean", num(s.mean)}, {"std", num(s.std)}, {"n", s.n}};
  return {{"config", config}, {"runs", runs_j}, {"aggregate", agg}, {"excluded", excluded}};
}

RunReport RunReport::from_json(const json& j) {
  RunReport rep;
  try {
    rep.config = j.at("config");
    for (const auto& r : j.at("runs")) rep.runs.push_back(record_from_json(r));
    rep.recompute_aggregate();
    const json& agg = j.at("aggregate");
    if (agg.size() != rep.aggregate.size()) throw ConfigError("report: aggregate metric set differs from rows");
    for (const auto& [name, s] : rep.aggregate) {
      const json& a = agg.at(name);
      const double mean = read_num(a.at("mean"), kNaN);
      const double std = read_num(a.at("std"), kNaN);
      auto same = [](double x, double y) {
        if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
        return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x));
      };
      if (!same(mean, s.mean) || !same(std, s.std) || a.at("n").get<int>() != s.n) {
        throw ConfigError("report: aggregate '" + name + "' is not recomputable from the rows");
      }
    }
    if (j.at("excluded").get<int>() != rep.excluded) throw ConfigError("report: exclusion count mismatch");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: malformed: ") + e.what());
  }
  return rep;
}

std::string metrics_csv_header() {
  std::string h =
      "run,seed,failed,global_evaluations,local_evaluations,raw_clusters,reduced_clusters,local_clusters,"
      "coverage,minima_coverage";
  for (const char* m : kAllMethods) {
    h += std::string(",hausdorff_") + m + ",empty_" + m + ",downgraded_" + m + ",failed_" + m;
  }
  return h;
}

std::string metrics_csv(const RunReport& report) {
  auto fmt = [](double v) -> std::string {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  std::ostringstream os;
  os << metrics_csv_header() << '\n';
  for (const auto& r : report.runs) {
    os << r.run << ',' << r.seed << ',' << (r.failed ? 1 : 0) << ',' << r.global_evaluations << ','
       << r.local_evaluations << ',' << r.raw_clusters << ',' << r.reduced_clusters << ','
       << r.local_clusters << ',' << fmt(r.coverage) << ',' << fmt(r.minima_coverage);
    for (const char* m : kAllMethods) {
      auto it = r.methods.find(m);
      if (it == r.methods.end()) {
        os << ",,,,";
      } else {
        os << ',' << fmt(it->second.mean_hausdorff) << ',' << it->second.empty << ','
           << it->second.downgraded << ',' << it->second.failed;
      }
    }
    os << '\n';
  }
  return os.str();
}

// ---- pipeline --------------------------------------------------------------

const std::vector<PointCloud>& exact_regions(BenchmarkCase c, double grid_step) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::vector<PointCloud>> cache;
  const std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(static_cast<int>(c), grid_step);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const Benchmark bm = benchmark(c);
  std::vector<PointCloud> regions;
  if (c == BenchmarkCase::III) {
    regions = exact_region_points_around(bm.problem, bm.truth.minima, 1.5, bm.truth.region_cutoff, grid_step);
  } else {
    regions = exact_region_points(bm.problem, bm.truth.region_cutoff, grid_step);
  }
  return cache.emplace(key, std::move(regions)).first->second;
}

namespace {

json hms_trace(const HmsResult& r) {
  json me = json::array();
  for (const auto& rec : r.trace) {
    json demes = json::array();
    for (const auto& d : rec.demes) {
      demes.push_back({{"id", d.id},
                       {"level", d.level},
                       {"active", d.active},
                       {"stop_reason", d.stop_reason},
                       {"mean", vec(d.mean)},
                       {"sigma", d.sigma},
                       {"best", d.best},
                       {"evaluations", d.evaluations}});
    }
    me.push_back({{"metaepoch", rec.metaepoch}, {"evaluations", rec.evaluations}, {"demes", demes}});
  }
  return {{"algorithm", "hms"}, {"metaepochs", me}};
}

json nea2_trace(const Nea2Result& r) {
  json rounds = json::array();
  for (const auto& rd : r.trace) {
    rounds.push_back({{"round", rd.round},
                      {"sample", rd.sample},
                      {"clusters", rd.clusters},
                      {"cma_evaluations", rd.cma_evaluations},
                      {"stop_reasons", rd.stop_reasons},
                      {"evaluations", rd.evaluations}});
  }
  return {{"algorithm", "nea2"}, {"rounds", rounds}};
}

void collect_leaf_reasons(const DemeNode& node, std::vector<std::string>& out) {
  if (node.is_leaf()) out.emplace_back(stop_reason_name(node.stop_reason));
  for (const auto& c : node.children) collect_leaf_reasons(c, out);
}

}  // namespace

RunArtifacts run_pipeline(const ExperimentConfig& config, std::uint64_t seed, int run_index) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunArtifacts art;
  RunRecord& rec = art.record;
  rec.run = run_index;
  rec.seed = seed;

  const Benchmark bm = benchmark(config.benchmark_case, config.ellipse_axis_scale);
  const Problem& problem = bm.problem;
  const int dim = problem.dimension();

  // global phase
  EvalBudget global(config.budget);
  Rng global_rng(derive_seed(seed, 1));
  if (config.algorithm == Algorithm::hms) {
    HmsConfig h = config.hms;
    h.budget = config.budget;
    HmsResult r = hms_run(problem, h, global, global_rng);
    art.raw = extract_clusters(r.tree, r.leaf_points);
    collect_leaf_reasons(r.tree, rec.stop_reasons);
    art.trace = hms_trace(r);
  } else {
    Nea2Config n = config.nea2;
    n.budget = config.budget;
    Nea2Result r = nea2_run(problem, n, global, global_rng);
    art.raw = std::move(r.clusters);
    for (const auto& rd : r.trace) {
      rec.stop_reasons.insert(rec.stop_reasons.end(), rd.stop_reasons.begin(), rd.stop_reasons.end());
    }
    art.trace = nea2_trace(r);
  }
  rec.global_evaluations = global.used();
  rec.raw_clusters = static_cast<int>(art.raw.size());

  // local phase on its own budget
  EvalBudget local;
  const Evaluator local_eval(problem, local);
  art.reduced = merge_clusters(art.raw, local_eval, config.hill_valley_points);
  rec.reduced_clusters = static_cast<int>(art.reduced.size());
  for (const Cluster& c : art.reduced) {
    try {
      Rng resize_rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(c.id)));
      Cluster sized = resize_cluster(c, config.resize_min, config.resize_max, resize_rng);
      if (sized.points.empty()) {
        rec.notes.push_back("reduced cluster " + std::to_string(c.id) + " empty, dropped");
        continue;
      }
      Rng mwea_rng(derive_seed(seed, 100000 + static_cast<std::uint64_t>(c.id)));
      Cluster q = mwea_run(sized, local_eval, config.mwea, mwea_rng);
      q.id = static_cast<int>(art.local.size());
      q.provenance = {c.id};
      art.local.push_back(std::move(q));
    } catch (const Error& e) {
      rec.notes.push_back("local phase of cluster " + std::to_string(c.id) + ": " + e.what());
    }
  }
  rec.local_clusters = static_cast<int>(art.local.size());
  rec.local_evaluations = local.used();

  // metrics that only need the clusters
  rec.coverage = bm.truth.regions.empty() || bm.truth.regions.front().ellipses.empty()
                     ? kNaN
                     : coverage_ratio(art.local, bm.truth);
  rec.minima_coverage = bm.truth.minima.empty() ? kNaN : minima_coverage(art.local, bm.truth);

  // approximations
  const double step = config.resolved_grid_step(dim);
  static const std::vector<PointCloud> kNoRegions;
  const std::vector<PointCloud>& exact =
      config.methods.empty() ? kNoRegions : exact_regions(config.benchmark_case, step);
  std::vector<GridIndex> exact_index;
  exact_index.reserve(exact.size());
  for (const auto& e : exact) exact_index.emplace_back(e);
  std::vector<int> pairing;
  for (const Cluster& q : art.local) pairing.push_back(nearest_region(q.centroid(), exact));

  for (approx::Method method : config.methods) {
    MethodMetrics mm;
    // union of the non-empty approximations paired with each exact region
    std::vector<PointCloud> paired(exact.size(), PointCloud(dim));
    for (const Cluster& q : art.local) {
      const int region = pairing[static_cast<std::size_t>(q.id)];
      mm.paired_region.push_back(region);
      try {
        approx::SurrogateFit fit = approx::fit_surrogate(q, method, config.grid, problem.bounds());
        if (fit.downgraded) {
          ++mm.downgraded;
          rec.notes.push_back("cluster " + std::to_string(q.id) + ": " + fit.note);
        }
        auto surrogate = std::make_shared<const approx::Surrogate>(std::move(fit.surrogate));
        RegionApproximation ra = level_set(surrogate, q, config.epsilon, step, problem.bounds().lower);
        if (ra.empty()) {
          ++mm.empty;
        } else if (region >= 0) {
          paired[static_cast<std::size_t>(region)].append(ra.points);
        }
        RunArtifacts::Approximation a{method, q.id, std::move(ra), {}};
        if (dim == 2) a.isoline = isolines(*surrogate, a.region.level, step, problem.bounds().lower);
        art.approximations.push_back(std::move(a));
      } catch (const Error& e) {
        ++mm.failed;
        rec.notes.push_back(std::string(approx::method_name(method)) + " on cluster " + std::to_string(q.id) +
                            ": " + e.what());
      }
    }
    std::vector<double> found;
    for (std::size_t r = 0; r < exact.size(); ++r) {
      double h = kInf;
      if (!paired[r].empty()) {
        h = std::max(directed_hausdorff(paired[r], exact_index[r]),
                     directed_hausdorff(exact[r], GridIndex(paired[r])));
        found.push_back(h);
      }
      mm.hausdorff.push_back(h);
    }
    mm.mean_hausdorff = found.empty() ? kNaN : summarize(found).mean;
    rec.methods[approx::method_name(method)] = std::move(mm);
  }

  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return art;
}

// ---- output files ----------------------------------------------------------

namespace {

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << s;
}

PointCloud cloud_of(const Cluster& c, int dim) { return PointCloud::from(c.points, dim); }

}  // namespace

void write_run_files(const RunArtifacts& art, const ExperimentConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  const int run = art.record.run;
  const auto stage_file = [&](const char* stage, const std::vector<Cluster>& clusters) {
    std::vector<PointCloud> blocks;
    for (const auto& c : clusters) {
      if (!c.points.empty()) blocks.push_back(cloud_of(c, static_cast<int>(c.points.front().x.size())));
    }
    std::ostringstream os;
    write_blocks(os, blocks);
    write_text(dir / ("clusters-" + std::string(stage) + "-" + std::to_string(run) + ".dat"), os.str());
  };
  stage_file("raw", art.raw);
  stage_file("reduced", art.reduced);
  stage_file("local", art.local);
  for (const auto& a : art.approximations) {
    const std::string tag = std::string(approx::method_name(a.method)) + "-" + std::to_string(run) + "-" +
                            std::to_string(a.cluster);
    std::ostringstream os;
    write_blocks(os, {a.region.points});
    write_text(dir / ("region-" + tag + ".dat"), os.str());
    if (!a.isoline.empty()) {
      std::ostringstream is;
      write_segments(is, a.isoline);
      write_text(dir / ("isoline-" + tag + ".dat"), is.str());
    }
    if (config.write_surrogates && a.region.surrogate) {
      write_text(dir / ("surrogate-" + tag + ".json"), a.region.surrogate->to_json().dump(1) + "\n");
    }
  }
  write_text(dir / ("trace-" + std::to_string(run) + ".json"), art.trace.dump() + "\n");
}

RunReport run_experiment(const ExperimentConfig& config, const std::optional<fs::path>& out_dir,
                         const std::function<void(int)>& run_hook) {
  config.validate();
  if (out_dir) fs::create_directories(*out_dir);
  RunReport report;
  report.config = config.to_json();
  report.runs.resize(static_cast<std::size_t>(config.repeats));

  std::atomic<int> next{0};
  std::mutex io;
  auto worker = [&]() {
    for (int i = next++; i < config.repeats; i = next++) {
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
      RunRecord rec;
      try {
        if (run_hook) run_hook(i);
        RunArtifacts art = run_pipeline(config, seed, i);
        if (out_dir) write_run_files(art, config, *out_dir);
        rec = std::move(art.record);
      } catch (const std::exception& e) {
        rec = RunRecord{};
        rec.run = i;
        rec.seed = seed;
        rec.failed = true;
        rec.error = e.what();
        rec.coverage = kNaN;
        rec.minima_coverage = kNaN;
        const std::lock_guard<std::mutex> lock(io);
        std::fprintf(stderr, "warning: run %d (seed %llu) failed: %s\n", i,
                     static_cast<unsigned long long>(seed), e.what());
      }
      report.runs[static_cast<std::size_t>(i)] = std::move(rec);
    }
  };
  const int threads = std::min(config.jobs, config.repeats);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  report.recompute_aggregate();

  if (out_dir) {
    write_text(*out_dir / "report.json", report.to_json().dump(1) + "\n");
    write_text(*out_dir / "metrics.csv", metrics_csv(report));
    write_text(*out_dir / "config.resolved.json", config.to_json().dump(1) + "\n");
    if (!config.methods.empty()) {
      const Benchmark bm = benchmark(config.benchmark_case);
      std::ostringstream os;
      write_blocks(os, exact_regions(config.benchmark_case, config.resolved_grid_step(bm.problem.dimension())));
      write_text(*out_dir / "exact-regions.dat", os.str());
    }
  }
  return report;
}

}  // namespace regionmap
