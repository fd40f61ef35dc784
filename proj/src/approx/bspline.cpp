#include "regionmap/approx/bspline.hpp"

#include <algorithm>
#include <cmath>

namespace regionmap::approx {

namespace {

constexpr std::array<double, 3> kGaussNode = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussWeight = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

std::vector<std::size_t> strides(const std::vector<int>& cells) {
  std::vector<std::size_t> s(cells.size());
  std::size_t acc = 1;
  for (std::size_t a = cells.size(); a-- > 0;) {
    s[a] = acc;
    acc *= static_cast<std::size_t>(cells[a] + 2);
  }
  return s;
}

// 1D Gram matrices of the basis: mass and derivative (both in x units).
void axis_gram(int cells, double h, Matrix& mass, Matrix& stiff) {
  const int n = cells + 2;
  mass = Matrix::Zero(n, n);
  stiff = Matrix::Zero(n, n);
  for (int c = 0; c < cells; ++c) {
    for (int q = 0; q < 3; ++q) {
      const double u = c + 0.5 * (kGaussNode[q] + 1.0);
      const double w = 0.5 * kGaussWeight[q] * h;
      const AxisBasis b = axis_basis(u, cells);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          mass(b.first + i, b.first + j) += w * b.value[i] * b.value[j];
          stiff(b.first + i, b.first + j) += w * b.slope[i] * b.slope[j] / (h * h);
        }
      }
    }
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

AxisBasis axis_basis(double u, int cells) {
  u = std::clamp(u, 0.0, static_cast<double>(cells));
  int c = static_cast<int>(std::floor(u));
  if (c >= cells) c = cells - 1;
  const double t = u - c;
  AxisBasis b;
  b.first = c;
  b.value = {0.5 * (1.0 - t) * (1.0 - t), 0.5 * (-2.0 * t * t + 2.0 * t + 1.0), 0.5 * t * t};
  b.slope = {-(1.0 - t), 1.0 - 2.0 * t, t};
  return b;
}

BsplineModel::BsplineModel(Box box, std::vector<int> cells, Vector coefficients)
    : box_(std::move(box)), cells_(std::move(cells)), coef_(std::move(coefficients)) {
  if (static_cast<int>(cells_.size()) != box_.dim()) throw InvalidArgument("bspline: cells/box mismatch");
  std::size_t n = 1;
  for (int c : cells_) {
    if (c < 1) throw InvalidArgument("bspline: need at least one cell per axis");
    n *= static_cast<std::size_t>(c + 2);
  }
  if (static_cast<std::size_t>(coef_.size()) != n) throw InvalidArgument("bspline: coefficient count");
}

template <typename F>
void BsplineModel::for_each_basis(const Vector& x, F&& f) const {
  const int d = dim();
  std::array<AxisBasis, 8> axes;
  std::array<double, 8> inv_h{};
  for (int a = 0; a < d; ++a) {
    const double h = (box_.upper[a] - box_.lower[a]) / cells_[a];
    inv_h[a] = 1.0 / h;
    axes[a] = axis_basis((x[a] - box_.lower[a]) * inv_h[a], cells_[a]);
  }
  const std::vector<std::size_t> stride = strides(cells_);
  int total = 1;
  for (int a = 0; a < d; ++a) total *= 3;
  for (int m = 0; m < total; ++m) {
    int rest = m;
    std::size_t flat = 0;
    std::array<int, 8> local{};
    for (int a = d - 1; a >= 0; --a) {
      local[a] = rest % 3;
      rest /= 3;
      flat += static_cast<std::size_t>(axes[a].first + local[a]) * stride[a];
    }
    f(flat, axes, local, inv_h);
  }
}

double BsplineModel::value(const Vector& x) const {
  double s = 0.0;
  const int d = dim();
  for_each_basis(x, [&](std::size_t flat, const auto& axes, const auto& local, const auto&) {
    double phi = 1.0;
    for (int a = 0; a < d; ++a) phi *= axes[a].value[local[a]];
    s += coef_[static_cast<Eigen::Index>(flat)] * phi;
  });
  return s;
}

std::vector<double> BsplineModel::grid_values(const std::vector<std::vector<double>>& axes) const {
  const int d = dim();
  if (static_cast<int>(axes.size()) != d) throw InvalidArgument("bspline grid: wrong axis count");
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.size();
  std::vector<double> out(total);
  if (total == 0) return out;
  std::vector<std::vector<AxisBasis>> basis(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const double inv_h = 1.0 / ((box_.upper[a] - box_.lower[a]) / cells_[a]);
    for (double v : axes[a]) basis[a].push_back(axis_basis((v - box_.lower[a]) * inv_h, cells_[a]));
  }
  // partial[a]: coefficients contracted over axes 0..a-1, row-major over axes a..d-1
  const std::vector<std::size_t> stride = strides(cells_);
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(d));
  partial[0].assign(coef_.data(), coef_.data() + coef_.size());
  for (int a = 1; a < d; ++a) partial[a].resize(stride[a - 1]);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::size_t flat = 0;
  int a = 0;
  while (true) {
    if (a < d - 1) {
      const AxisBasis& b = basis[a][idx[a]];
      const std::size_t len = stride[a];
      const double* src = partial[a].data() + static_cast<std::size_t>(b.first) * len;
      double* dst = partial[a + 1].data();
      for (std::size_t t = 0; t < len; ++t) {
        dst[t] = b.value[0] * src[t] + b.value[1] * src[len + t] + b.value[2] * src[2 * len + t];
      }
      ++a;
      continue;
    }
    const double* src = partial[a].data();
    for (const AxisBasis& b : basis[a]) {
      out[flat++] = b.value[0] * src[b.first] + b.value[1] * src[b.first + 1] + b.value[2] * src[b.first + 2];
    }
    idx[a] = 0;
    --a;
    while (a >= 0 && ++idx[a] == axes[a].size()) {
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

Vector BsplineModel::gradient(const Vector& x) const {
  const int d = dim();
  Vector g = Vector::Zero(d);
  for_each_basis(x, [&](std::size_t flat, const auto& axes, const auto& local, const auto& inv_h) {
    for (int k = 0; k < d; ++k) {
      double phi = 1.0;
      for (int a = 0; a < d; ++a) {
        phi *= a == k ? axes[a].slope[local[a]] * inv_h[a] : axes[a].value[local[a]];
      }
      g[k] += coef_[static_cast<Eigen::Index>(flat)] * phi;
    }
  });
  return g;
}

double BsplineModel::basis_sum(const Vector& x) const {
  double s = 0.0;
  const int d = dim();
  for_each_basis(x, [&](std::size_t, const auto& axes, const auto& local, const auto&) {
    double phi = 1.0;
    for (int a = 0; a < d; ++a) phi *= axes[a].value[local[a]];
    s += phi;
  });
  return s;
}

BsplineModel bspline_project(const SimplicialInterpolant& interp, const Box& box,
                             const std::vector<int>& cells, Projection mode) {
  const int d = interp.dim();
  if (box.dim() != d || static_cast<int>(cells.size()) != d) {
    throw InvalidArgument("bspline_project: dimension mismatch");
  }
  if (d > 8) throw InvalidArgument("bspline_project: dimension too large");
  std::vector<double> h(d);
  std::vector<Matrix> mass(d), stiff(d);
  for (int a = 0; a < d; ++a) {
    if (cells[a] < 1) throw InvalidArgument("bspline_project: need at least one cell per axis");
    h[a] = (box.upper[a] - box.lower[a]) / cells[a];
    if (!(h[a] > 0.0)) throw DegenerateGeometry("bspline_project: empty box");
    axis_gram(cells[a], h[a], mass[a], stiff[a]);
  }

  Matrix system = mass[0];
  for (int a = 1; a < d; ++a) system = kron(system, mass[a]);
  if (mode == Projection::H1) {
    for (int k = 0; k < d; ++k) {
      Matrix term = k == 0 ? stiff[0] : mass[0];
      for (int a = 1; a < d; ++a) term = kron(term, a == k ? stiff[a] : mass[a]);
      system += term;
    }
  }
  const auto n = system.rows();
  Vector rhs = Vector::Zero(n);

  const std::vector<std::size_t> stride = strides(cells);
  std::size_t cell_total = 1;
  for (int a = 0; a < d; ++a) cell_total *= static_cast<std::size_t>(cells[a]);
  int quad_total = 1;
  for (int a = 0; a < d; ++a) quad_total *= 3;
  int basis_total = quad_total;

  int hint = -1;
  Vector x(d);
  std::vector<int> cell(d);
  std::vector<int> q(d);
  std::vector<AxisBasis> axes(d);
  for (std::size_t ci = 0; ci < cell_total; ++ci) {
    std::size_t rest = ci;
    for (int a = d - 1; a >= 0; --a) {
      cell[a] = static_cast<int>(rest % static_cast<std::size_t>(cells[a]));
      rest /= static_cast<std::size_t>(cells[a]);
    }
    for (int qi = 0; qi < quad_total; ++qi) {
      int r = qi;
      double w = 1.0;
      for (int a = d - 1; a >= 0; --a) {
        q[a] = r % 3;
        r /= 3;
        const double u = cell[a] + 0.5 * (kGaussNode[q[a]] + 1.0);
        x[a] = box.lower[a] + u * h[a];
        w *= 0.5 * kGaussWeight[q[a]] * h[a];
        axes[a] = axis_basis(u, cells[a]);
        // quadrature nodes are interior, so the cell found is `cell`
        axes[a].first = cell[a];
      }
      const ValueGradient fg = interp.extended(x, &hint);
      for (int m = 0; m < basis_total; ++m) {
        int rr = m;
        std::size_t flat = 0;
        double phi = 1.0;
        double dot = 0.0;
        std::array<int, 8> local{};
        for (int a = d - 1; a >= 0; --a) {
          local[a] = rr % 3;
          rr /= 3;
          flat += static_cast<std::size_t>(cell[a] + local[a]) * stride[a];
          phi *= axes[a].value[local[a]];
        }
        if (mode == Projection::H1) {
          for (int k = 0; k < d; ++k) {
            double dphi = 1.0;
            for (int a = 0; a < d; ++a) {
              dphi *= a == k ? axes[a].slope[local[a]] / h[a] : axes[a].value[local[a]];
            }
            dot += fg.gradient[k] * dphi;
          }
        }
        rhs[static_cast<Eigen::Index>(flat)] += w * (fg.value * phi + dot);
      }
    }
  }

  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw RankDeficient("bspline_project: system is not positive definite");
  Vector coef = llt.solve(rhs);
  if (!coef.allFinite()) throw RankDeficient("bspline_project: non-finite coefficients");
  return BsplineModel(box, cells, std::move(coef));
}

}  // namespace regionmap::approx
