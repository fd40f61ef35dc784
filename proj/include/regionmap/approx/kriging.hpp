#pragma once

#include <vector>

#include "regionmap/point_cloud.hpp"

namespace regionmap::approx {

/// Ordinary Kriging with the kernel exp(-r^2 / (2 l^2)).
class KrigingModel {
 public:
  KrigingModel() = default;

  /// l = median nearest-neighbour distance. The nugget starts at 1e-8 and
  /// grows tenfold up to 1e-2; past that ConditioningError is thrown.
  /// Coincident points are merged with their values averaged.
  static KrigingModel fit(const std::vector<Vector>& points, const std::vector<double>& values);

  /// Rebuilds a model from stored parameters (no re-solve of l or nugget).
  static KrigingModel from_parts(const std::vector<Vector>& points, const std::vector<double>& values,
                                 double length_scale, double nugget);

  int dim() const { return cloud_.dim(); }
  std::size_t size() const { return values_.size(); }
  double length_scale() const { return length_; }
  double nugget() const { return nugget_; }
  double mean() const { return beta_; }
  const Vector& alpha() const { return alpha_; }
  const PointCloud& points() const { return cloud_; }
  const std::vector<double>& values() const { return values_; }

  double predict(const Vector& x) const;
  /// Ordinary-Kriging weights on the training values; they sum to one.
  Vector weights(const Vector& x) const;

  /// predict(x) <= level on every point of the grid axes[0] x ... x axes[d-1],
  /// last axis fastest. The kernel factors per axis, so each term costs one
  /// multiply; points within rounding distance of the level are re-checked
  /// with predict().
  std::vector<char> grid_at_or_below(const std::vector<std::vector<double>>& axes,
                                     double level) const;

 private:
  bool solve(double nugget);
  Vector kernel_column(const Vector& x) const;

  PointCloud cloud_;
  std::vector<double> values_;
  double length_ = 1.0;
  double nugget_ = 1e-8;
  double beta_ = 0.0;
  Vector alpha_;
  Eigen::LLT<Matrix> chol_;
  Vector kinv_one_;
  double one_kinv_one_ = 1.0;

  double abs_alpha_sum_ = 0.0;
};

}  // namespace regionmap::approx
