#pragma once

#include <vector>

#include "regionmap/cluster.hpp"
#include "regionmap/problems.hpp"

namespace regionmap {

/// Hill-valley test: evaluates `k` equally spaced interior points of [a, b]
/// and reports a common basin when none exceeds max(f(a), f(b)) + 1e-9.
/// Identical endpoints return true without evaluating.
bool hill_valley_same_basin(const EvaluatedPoint& a, const EvaluatedPoint& b, const Evaluator& eval,
                            int k);

struct MergeStats {
  int pairs_tested = 0;
  std::uint64_t evaluations = 0;
};

/// Joins clusters whose best points pass the hill-valley test, transitively.
/// Pairs already joined are not re-tested. The partition does not depend on
/// the input order.
std::vector<Cluster> merge_clusters(const std::vector<Cluster>& clusters, const Evaluator& eval,
                                    int k, MergeStats* stats = nullptr);

/// Subsamples to `max_size` or records a deficit up to `min_size`.
/// Empty clusters come back empty (callers drop them).
Cluster resize_cluster(const Cluster& cluster, int min_size, int max_size, Rng& rng);

struct MweaParams {
  int epochs = 3;
  double alpha = 0.5;
  /// Used when the initial diameter is zero.
  double fallback_std = 0.5;

  void validate() const;
};

/// Greedy committee of size k from `pool`: first the best point, then the
/// candidate maximising alpha * (1 - rank percentile) + (1 - alpha) * distance
/// to the committee (normalised by the committee diameter so far).
/// Returns indices into `pool`.
std::vector<std::size_t> committee_select(const std::vector<EvaluatedPoint>& pool, std::size_t k,
                                          double alpha);

double diameter(const std::vector<EvaluatedPoint>& points);

/// Local phase on one reduced cluster. Returns every point seen during the
/// run (initial members plus all mutants), at stage local.
Cluster mwea_run(const Cluster& cluster, const Evaluator& eval, const MweaParams& params, Rng& rng);

}  // namespace regionmap
