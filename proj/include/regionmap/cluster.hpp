#pragma once

#include <vector>

#include "regionmap/core.hpp"

namespace regionmap {

enum class ClusterStage { raw, reduced, local };

const char* stage_name(ClusterStage s);

/// A labelled point set at one pipeline stage.
struct Cluster {
  int id = 0;
  ClusterStage stage = ClusterStage::raw;
  std::vector<EvaluatedPoint> points;
  /// Ids of the source demes / clusters this one was built from.
  std::vector<int> provenance;
  /// Missing members to generate in the first local-phase epoch.
  int deficit = 0;
  /// False for NEA2 runs cut off by the budget.
  bool converged = true;

  const EvaluatedPoint& best() const;
  Vector centroid() const;
};

}  // namespace regionmap
