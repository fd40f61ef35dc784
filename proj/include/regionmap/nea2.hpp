#pragma once

#include <string>
#include <vector>

#include "regionmap/cluster.hpp"
#include "regionmap/engines.hpp"

namespace regionmap {

struct NbcParams {
  double phi = 2.0;
  double b = 3.0;
  /// 0 means 40 * dimension.
  int sample_size = 0;

  void validate() const;
  int resolved_sample_size(int dim) const { return sample_size > 0 ? sample_size : 40 * dim; }
};

/// Nearest-better graph after both cutting rules; exposed for oracle tests.
struct NbcGraph {
  /// parent[i] = nearest better point, -1 for the best one.
  std::vector<int> parent;
  std::vector<double> length;
  /// Edge still present after cutting.
  std::vector<char> kept;
  /// Component id per point.
  std::vector<int> component;
  int components = 0;
};

NbcGraph nbc_graph(const std::vector<EvaluatedPoint>& points, const NbcParams& params);

/// Nearest Better Clustering. Fitness ties go to the earlier evaluation,
/// distance ties to the lower input position. Rule 1 cuts edges longer than
/// phi times the mean edge length; rule 2, applied to the rule-1 graph, cuts
/// the outgoing edge of any node with >= 3 incoming edges when it exceeds b
/// times the median incoming length.
std::vector<Cluster> nbc(const std::vector<EvaluatedPoint>& points, const NbcParams& params);

struct Nea2Config {
  NbcParams nbc;
  double sigma0 = 0.5;
  int lambda = 0;
  double stagnation_tol = 0.01;
  int stagnation_window = 3;
  std::uint64_t budget = 500;

  void validate() const;
};

struct Nea2Round {
  int round = 0;
  std::size_t sample = 0;
  int clusters = 0;
  std::vector<int> cma_evaluations;
  std::vector<std::string> stop_reasons;
  std::uint64_t evaluations = 0;
};

struct Nea2Result {
  /// Final population of every CMA-ES run; unconverged ones are flagged.
  std::vector<Cluster> clusters;
  std::vector<Nea2Round> trace;
};

Nea2Result nea2_run(const Problem& problem, const Nea2Config& config, EvalBudget& budget, Rng& rng);

}  // namespace regionmap
