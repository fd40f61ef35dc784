#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "regionmap/approx/surrogate.hpp"
#include "regionmap/problems.hpp"

namespace regionmap {

/// Grid discretisation of {x in dom f~ : f~(x) <= min over the cluster of f~ + epsilon}.
struct RegionApproximation {
  std::shared_ptr<const approx::Surrogate> surrogate;
  double epsilon = 0.0;
  double level = 0.0;
  double grid_step = 0.0;
  PointCloud points;
  bool empty() const { return points.empty(); }
};

/// The lattice is anchored at `origin` (the problem's lower corner in the
/// pipeline) so approximations share the exact regions' grid.
RegionApproximation level_set(std::shared_ptr<const approx::Surrogate> surrogate,
                              const Cluster& cluster, double epsilon, double grid_step,
                              const Vector& origin);

/// Uniform bucket grid over a point set; the cloud is stored bucket-sorted
/// so each bucket is one contiguous range for the distance kernels.
class GridIndex {
 public:
  explicit GridIndex(const PointCloud& points);

  const PointCloud& points() const { return sorted_; }
  /// Squared distance to the nearest indexed point. With `enough` > 0 the
  /// search may stop as soon as some point within sqrt(enough) is found, in
  /// which case the return value is only an upper bound below `enough`.
  double nearest_sq(const double* query, double enough = -1.0) const;

 private:
  long cell_of(int axis, double v) const;
  std::size_t flat(const std::array<long, simd::kMaxDim>& c) const;
  double scan_all(const double* query, double best, double enough) const;

  PointCloud sorted_;
  int dim_ = 0;
  Vector lower_;
  double cell_ = 1.0;
  std::array<long, simd::kMaxDim> cells_{};
  std::vector<std::size_t> start_;
  std::size_t occupied_ = 0;
};

/// Directed max-min distance from a to b; +infinity if either is empty.
double directed_hausdorff(const PointCloud& a, const GridIndex& b);
/// Symmetric Hausdorff distance; +infinity if either set is empty.
double hausdorff(const PointCloud& a, const PointCloud& b);

/// Fraction of ground-truth regions for which one cluster has a point in
/// every coverage ellipse of the region.
double coverage_ratio(const std::vector<Cluster>& clusters, const GroundTruth& truth);

/// Fraction of minima with some cluster point strictly closer than the radius.
double minima_coverage(const std::vector<Cluster>& clusters, const GroundTruth& truth);

/// Index of the exact region whose nearest grid point is closest to `x`
/// (-1 when there are none or all are empty).
int nearest_region(const Vector& x, const std::vector<PointCloud>& regions);

/// Whitespace-separated coordinates, one point per line, a blank line
/// between blocks.
void write_blocks(std::ostream& os, const std::vector<PointCloud>& blocks);

struct Segment {
  Vector a;
  Vector b;
};

/// Marching squares over a regular 2D grid. values[i * ny + j] is the
/// sample at origin + (i * step, j * step). Saddle cells are resolved by the
/// cell-centre average.
std::vector<Segment> marching_squares(const std::vector<double>& values, long nx, long ny,
                                      const Vector& origin, double step, double level);

/// Isolines of the surrogate on the lattice restricted to its domain.
std::vector<Segment> isolines(const approx::Surrogate& surrogate, double level, double grid_step,
                              const Vector& origin);

void write_segments(std::ostream& os, const std::vector<Segment>& segments);

}  // namespace regionmap
