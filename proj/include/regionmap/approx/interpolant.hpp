#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "regionmap/approx/delaunay.hpp"
#include "regionmap/point_cloud.hpp"

namespace regionmap::approx {

struct ValueGradient {
  double value = 0.0;
  Vector gradient;
  /// False when x lay outside the hull and the nearest simplex was used.
  bool inside = true;
};

/// First-order Lagrange interpolant on the Delaunay complex of the data.
/// Exact duplicates are merged with their values averaged.
class SimplicialInterpolant {
 public:
  SimplicialInterpolant(const std::vector<Vector>& points, const std::vector<double>& values);

  const Delaunay& complex() const { return *mesh_; }
  int dim() const { return mesh_->dim(); }
  const std::vector<double>& values() const { return values_; }

  /// Barycentric-linear value, or nothing outside the convex hull.
  std::optional<double> interpolate(const Vector& x) const;

  /// Value and piecewise-constant gradient with the nearest-simplex
  /// extension outside the hull. `hint` is updated with the cell used.
  ValueGradient extended(const Vector& x, int* hint = nullptr) const;

 private:
  struct Piece {
    Vector origin;
    Matrix inverse;
    double f0 = 0.0;
    Vector gradient;
  };

  const Piece& piece(int cell) const { return pieces_[piece_of_[cell]]; }
  double eval_piece(int cell, const Vector& x) const;
  Vector lambda(int cell, const Vector& x) const;
  int containing(const Vector& x, int* hint) const;
  int nearest_piece(const Vector& x, double* min_lambda) const;

  std::unique_ptr<Delaunay> mesh_;
  std::vector<double> values_;
  std::vector<Piece> pieces_;
  std::vector<int> piece_of_;
  std::vector<std::vector<int>> incident_;
  PointCloud cloud_;
  std::vector<int> vertex_of_;
};

/// Averages the values of exactly coincident points. Output follows first
/// appearance order.
void merge_duplicates(std::vector<Vector>& points, std::vector<double>& values);

}  // namespace regionmap::approx
