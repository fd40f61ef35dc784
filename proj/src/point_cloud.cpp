#include "regionmap/point_cloud.hpp"

namespace regionmap {

PointCloud::PointCloud(int dim) : dim_(dim), columns_(static_cast<std::size_t>(dim)) {
  if (dim <= 0 || dim > simd::kMaxDim) throw InvalidArgument("point cloud dimension out of range");
}

PointCloud PointCloud::from(const std::vector<Vector>& points, int dim) {
  PointCloud out(dim);
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p);
  return out;
}

PointCloud PointCloud::from(const std::vector<EvaluatedPoint>& points, int dim) {
  PointCloud out(dim);
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.x);
  return out;
}

void PointCloud::reserve(std::size_t n) {
  for (auto& c : columns_) c.reserve(n);
}

void PointCloud::push_back(const Vector& x) {
  if (x.size() != dim_) throw InvalidArgument("point dimension does not match cloud");
  for (int c = 0; c < dim_; ++c) columns_[c].push_back(x[c]);
}

void PointCloud::push_back(const double* x) {
  for (int c = 0; c < dim_; ++c) columns_[c].push_back(x[c]);
}

void PointCloud::append(const PointCloud& other) {
  if (other.dim_ != dim_) throw InvalidArgument("point cloud dimension mismatch");
  for (int c = 0; c < dim_; ++c) {
    columns_[c].insert(columns_[c].end(), other.columns_[c].begin(), other.columns_[c].end());
  }
}

Vector PointCloud::point(std::size_t i) const {
  Vector x(dim_);
  for (int c = 0; c < dim_; ++c) x[c] = columns_[c][i];
  return x;
}

simd::ColumnView PointCloud::view() const {
  simd::ColumnView v;
  v.dim = dim_;
  v.size = size();
  for (int c = 0; c < dim_; ++c) v.columns[c] = columns_[c].data();
  return v;
}

}  // namespace regionmap
