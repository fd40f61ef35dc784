#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "regionmap/cluster.hpp"
#include "regionmap/engines.hpp"

namespace regionmap {

struct SeaState {
  SeaParams params;
  std::vector<EvaluatedPoint> population;
  int epochs = 0;
};

enum class DemeStatus { active, stopped };

struct DemeNode {
  int id = 0;
  int level = 1;
  std::variant<SeaState, CmaState> engine;
  DemeStatus status = DemeStatus::active;
  StopReason stop_reason = StopReason::none;
  std::optional<Vector> seed_point;
  std::vector<DemeNode> children;
  std::size_t evaluations = 0;

  bool active() const { return status == DemeStatus::active; }
  bool is_leaf() const { return level == 2; }
  const CmaState& cma() const { return std::get<CmaState>(engine); }
  const SeaState& sea() const { return std::get<SeaState>(engine); }
};

struct HmsConfig {
  int metaepoch_length = 3;
  SeaParams root;
  double sprout_min_distance = 1.0;
  double sprout_max_fitness = 0.5;
  double leaf_sigma0 = 0.5;
  int leaf_lambda = 0;
  double stagnation_tol = 0.01;
  int stagnation_window = 3;
  int sigma_warmup = 5;
  std::uint64_t budget = 500;

  void validate() const;
  StopSpec leaf_stop() const;
};

/// Per-metaepoch snapshot of every deme, for the run trace.
struct DemeSnapshot {
  int id = 0;
  int level = 0;
  bool active = false;
  std::string stop_reason;
  Vector mean;
  double sigma = 0.0;
  double best = 0.0;
  std::size_t evaluations = 0;
};

struct MetaepochRecord {
  int metaepoch = 0;
  std::uint64_t evaluations = 0;
  std::vector<DemeSnapshot> demes;
};

/// Advances every active deme by `metaepoch_length` epochs. Leaves run before
/// the root. Returns false once the budget is spent (the strategy halts).
bool metaepoch(DemeNode& tree, const HmsConfig& config, const Evaluator& eval, Rng& rng);

/// Sprouts a CMA-ES leaf at the root's current best individual when its
/// fitness is below `sprout_max_fitness` and it is at least
/// `sprout_min_distance` from every leaf seed and every leaf mean.
/// Returns the new leaf's id.
std::optional<int> try_sprout(DemeNode& tree, const HmsConfig& config);

struct HmsResult {
  DemeNode tree;
  /// Every point sampled by any CMA-ES leaf in any iteration.
  std::vector<EvaluatedPoint> leaf_points;
  std::vector<MetaepochRecord> trace;
};

HmsResult hms_run(const Problem& problem, const HmsConfig& config, EvalBudget& budget, Rng& rng);

/// Q_i = pooled leaf points within Mahalanobis distance 1 of leaf i's final
/// sampler. Empty clusters are dropped.
std::vector<Cluster> extract_clusters(const DemeNode& tree,
                                      const std::vector<EvaluatedPoint>& all_points);

}  // namespace regionmap
