#pragma once

#include <array>
#include <optional>
#include <vector>

#include "regionmap/core.hpp"

namespace regionmap::approx {

inline constexpr int kMaxSimplexDim = 6;

/// Delaunay triangulation in d dimensions (2 <= d <= 6) built by incremental
/// Bowyer-Watson insertion inside an enclosing super-simplex. Simplices that
/// touch a super vertex ("ghosts") are kept for point location but are not
/// part of the triangulation proper.
class Delaunay {
 public:
  using Simplex = std::array<int, kMaxSimplexDim + 1>;

  /// Throws DegenerateGeometry if the points do not span R^d. Exact
  /// duplicates must be removed by the caller.
  explicit Delaunay(const std::vector<Vector>& points);

  int dim() const { return dim_; }
  std::size_t vertex_count() const { return points_.size(); }
  const Vector& vertex(int i) const { return points_[i]; }

  /// Real simplices (vertex indices into the input).
  const std::vector<int>& simplices() const { return real_; }
  const Simplex& simplex(int s) const { return cells_[s].v; }
  /// Neighbour of cell s opposite its k-th vertex (-1 if none); may be a ghost.
  int neighbor(int s, int k) const { return cells_[s].nb[k]; }
  bool is_ghost(int s) const;

  /// Cell containing x (real or ghost), or -1 if x is outside the super-simplex.
  int locate(const Vector& x, int hint = -1) const;

  /// Barycentric coordinates of x in cell s.
  Vector barycentric(int s, const Vector& x) const;

  /// Brute-force exact check: no input vertex lies strictly inside any real
  /// simplex's circumsphere.
  bool empty_circumsphere_check() const;

  /// Inputs skipped as near-duplicates of an earlier vertex.
  const std::vector<int>& skipped() const { return skipped_; }

 private:
  struct Cell {
    Simplex v{};
    std::array<int, kMaxSimplexDim + 1> nb{};
    bool alive = true;
  };

  int orient(const Simplex& v) const;
  int orient(const std::array<const Vector*, kMaxSimplexDim + 1>& q) const;
  /// Sign of the lifted in-sphere determinant; exact zeros are broken by
  /// perturbing heights (pid < 0 for a point that is not a vertex).
  int insphere(const Simplex& v, const Vector& p, int pid) const;
  const Vector& coord(int i) const;
  void insert(int vid, int& hint);
  int walk(const Vector& p, int start) const;

  int dim_ = 0;
  std::vector<Vector> points_;
  std::vector<Vector> super_;
  double duplicate_tol_ = 0.0;
  int insphere_sign_ = 1;
  std::vector<Cell> cells_;
  std::vector<int> real_;
  std::vector<int> skipped_;
};

}  // namespace regionmap::approx
