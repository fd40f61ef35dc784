#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regionmap/core.hpp"
#include "regionmap/point_cloud.hpp"

namespace regionmap {

/// Box-constrained minimisation problem with an evaluation counter.
class Problem {
 public:
  using Objective = std::function<double(const Vector&)>;

  Problem(std::string name, Box bounds, Objective objective);

  const std::string& name() const { return name_; }
  int dimension() const { return bounds_.dim(); }
  const Box& bounds() const { return bounds_; }

  /// Counted evaluation. Safe to call concurrently.
  double evaluate(const Vector& x) const;
  /// Counted evaluation that also hands out the global evaluation index.
  EvaluatedPoint evaluate_point(const Vector& x) const;
  /// Uncounted access, for ground-truth construction and test oracles.
  const Objective& objective() const { return objective_; }

  std::uint64_t evaluations() const { return counter_->load(); }

 private:
  std::string name_;
  Box bounds_;
  Objective objective_;
  std::unique_ptr<std::atomic<std::uint64_t>> counter_;
};

/// Shared evaluation allowance. `try_consume` is the only way to spend it.
class EvalBudget {
 public:
  static constexpr std::uint64_t kUnlimited = ~std::uint64_t{0};

  explicit EvalBudget(std::uint64_t limit = kUnlimited) : limit_(limit) {}

  bool try_consume();
  std::uint64_t limit() const { return limit_; }
  std::uint64_t used() const { return used_.load(); }
  std::uint64_t remaining() const;
  bool exhausted() const { return remaining() == 0; }

 private:
  std::uint64_t limit_;
  std::atomic<std::uint64_t> used_{0};
};

/// Problem + budget; every engine evaluates through one of these.
class Evaluator {
 public:
  Evaluator(const Problem& problem, EvalBudget& budget) : problem_(&problem), budget_(&budget) {}

  /// Returns nothing once the budget is spent; the objective is not called then.
  std::optional<EvaluatedPoint> operator()(const Vector& x) const;

  const Problem& problem() const { return *problem_; }
  const Box& bounds() const { return problem_->bounds(); }
  EvalBudget& budget() const { return *budget_; }

 private:
  const Problem* problem_;
  EvalBudget* budget_;
};

// ---- benchmark building blocks -------------------------------------------

/// 1 - exp(-ln 2 * sum_i ((x_i - x0_i) / r_i)^2); equals 0.5 one radius away along an axis.
double gaussian_valley(const Vector& x, const Vector& x0, const Vector& r);

/// The C-shaped valley (three gaussian factors) evaluated at Rot(phi) x.
double c_shape(const Vector& x, double phi);

/// max((v - threshold) / (1 - threshold), 0); threshold must be < 1.
double flatten(double v, double threshold);

enum class BenchmarkCase { I, II, III };

BenchmarkCase parse_case(std::string_view label);
std::string_view case_label(BenchmarkCase c);

/// Planar ellipse used by the region-coverage metric. A point is inside when
/// Rot(rotation) (x - center) scaled by 1/semiaxes has norm <= 1.
struct CoverageEllipse {
  Vector center;
  Vector semiaxes;
  double rotation = 0.0;

  bool contains(const Vector& x) const;
};

struct Region {
  Vector center;
  std::vector<CoverageEllipse> ellipses;
};

struct GroundTruth {
  std::vector<Region> regions;
  double region_cutoff = 0.1;
  std::vector<Vector> minima;
  double minima_radius = 0.4;
};

struct Benchmark {
  Problem problem;
  GroundTruth truth;
};

/// Orientation of the C-shape centred at (2 + 4i, 2 + 4j).
double tile_rotation(int i, int j);

/// Builds one of the three benchmark problems with its ground truth.
/// `ellipse_axis_scale` = 0.5 reads the coverage axes as full lengths.
Benchmark benchmark(BenchmarkCase c, double ellipse_axis_scale = 1.0);

/// Lattice helpers shared by the exact and approximated region grids. The
/// lattice is anchored at `origin` with spacing `step`; `box` restricts it.
struct LatticeRange {
  std::vector<long> first;
  std::vector<long> count;
  std::size_t total() const;
};
LatticeRange lattice_range(const Vector& origin, double step, const Box& box);
Vector lattice_point(const Vector& origin, double step, const LatticeRange& range,
                     std::size_t flat_index);

/// Grid discretisation of the connected components of {f < cutoff} over the
/// whole domain, using face-neighbour adjacency.
std::vector<PointCloud> exact_region_points(const Problem& problem, double cutoff,
                                            double grid_step);

/// Same, but one component per listed centre, searched in the box of the given
/// radius around it (the component containing the lattice point nearest to
/// the centre).
std::vector<PointCloud> exact_region_points_around(const Problem& problem,
                                                   const std::vector<Vector>& centers,
                                                   double radius, double cutoff,
                                                   double grid_step);

}  // namespace regionmap
