#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "regionmap/core.hpp"
#include "regionmap/simd/distance_kernels.hpp"

namespace regionmap {

/// Column-major (structure-of-arrays) point storage. The distance kernels
/// stream one coordinate column at a time, so this is the layout every
/// metric and nearest-neighbour query works on.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(int dim);
  static PointCloud from(const std::vector<Vector>& points, int dim);
  static PointCloud from(const std::vector<EvaluatedPoint>& points, int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return columns_.empty() ? 0 : columns_[0].size(); }
  bool empty() const { return size() == 0; }

  void reserve(std::size_t n);
  void push_back(const Vector& x);
  void push_back(const double* x);
  void append(const PointCloud& other);

  double coord(std::size_t i, int axis) const { return columns_[axis][i]; }
  Vector point(std::size_t i) const;
  const std::vector<double>& column(int axis) const { return columns_[axis]; }

  simd::ColumnView view() const;

  bool operator==(const PointCloud& other) const = default;

 private:
  int dim_ = 0;
  std::vector<std::vector<double>> columns_;
};

}  // namespace regionmap
