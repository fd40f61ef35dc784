#pragma once

#include <array>
#include <vector>

#include "regionmap/approx/interpolant.hpp"

namespace regionmap::approx {

enum class Projection { L2, H1 };

/// Nonzero uniform quadratic B-splines at u (in cell units, 0 <= u <= cells).
/// Basis j covers cells j-2..j, so there are cells + 2 functions per axis.
struct AxisBasis {
  int first = 0;
  std::array<double, 3> value{};
  /// d/du; divide by the cell width for d/dx.
  std::array<double, 3> slope{};
};
AxisBasis axis_basis(double u, int cells);

/// Tensor-product quadratic B-spline on a uniform grid over `box`.
class BsplineModel {
 public:
  BsplineModel() = default;
  BsplineModel(Box box, std::vector<int> cells, Vector coefficients);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  const std::vector<int>& cells() const { return cells_; }
  const Vector& coefficients() const { return coef_; }
  std::size_t basis_count() const { return static_cast<std::size_t>(coef_.size()); }

  /// Points outside the box are clamped onto it.
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// value() on every point of axes[0] x ... x axes[d-1], last axis fastest,
  /// contracting one axis at a time (rounding may differ from value()).
  std::vector<double> grid_values(const std::vector<std::vector<double>>& axes) const;
  /// Sum of all basis functions at x.
  double basis_sum(const Vector& x) const;

 private:
  template <typename F>
  void for_each_basis(const Vector& x, F&& f) const;

  Box box_;
  std::vector<int> cells_;
  Vector coef_;
};

/// Galerkin projection of the interpolant (with its nearest-simplex
/// extension) onto the spline space: mass matrix for L2, mass plus stiffness
/// for H1, 3-point Gauss quadrature per cell and axis.
/// Throws RankDeficient when the system cannot be factorised.
BsplineModel bspline_project(const SimplicialInterpolant& interp, const Box& box,
                             const std::vector<int>& cells, Projection mode);

}  // namespace regionmap::approx
