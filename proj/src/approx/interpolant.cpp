#include "regionmap/approx/interpolant.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace regionmap::approx {

namespace {

constexpr double kHullTol = 1e-10;

double min_coeff(const Vector& lambda) { return lambda.minCoeff(); }

}  // namespace

void merge_duplicates(std::vector<Vector>& points, std::vector<double>& values) {
  if (points.size() != values.size()) throw InvalidArgument("points/values size mismatch");
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto lex = [&](std::size_t a, std::size_t b) {
    const Vector& p = points[a];
    const Vector& q = points[b];
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      if (p[k] != q[k]) return p[k] < q[k];
    }
    return a < b;
  };
  std::sort(idx.begin(), idx.end(), lex);
  std::vector<std::size_t> head(points.size());
  std::vector<double> sum(points.size(), 0.0);
  std::vector<int> count(points.size(), 0);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const std::size_t i = idx[r];
    if (r > 0 && points[idx[r - 1]] == points[i]) {
      head[i] = head[idx[r - 1]];
    } else {
      head[i] = i;
    }
    sum[head[i]] += values[i];
    ++count[head[i]];
  }
  std::vector<Vector> out_p;
  std::vector<double> out_v;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (head[i] != i) continue;
    out_p.push_back(points[i]);
    out_v.push_back(sum[i] / count[i]);
  }
  points = std::move(out_p);
  values = std::move(out_v);
}

SimplicialInterpolant::SimplicialInterpolant(const std::vector<Vector>& points,
                                             const std::vector<double>& values) {
  std::vector<Vector> p = points;
  values_ = values;
  merge_duplicates(p, values_);
  mesh_ = std::make_unique<Delaunay>(p);
  const int d = mesh_->dim();

  const auto& real = mesh_->simplices();
  int cells = 0;
  for (int s : real) cells = std::max(cells, s + 1);
  piece_of_.assign(static_cast<std::size_t>(cells), -1);
  incident_.assign(mesh_->vertex_count(), {});
  for (int s : real) {
    const auto& v = mesh_->simplex(s);
    Piece pc;
    pc.origin = mesh_->vertex(v[0]);
    Matrix t(d, d);
    Vector df(d);
    for (int k = 1; k <= d; ++k) {
      t.col(k - 1) = mesh_->vertex(v[k]) - pc.origin;
      df[k - 1] = values_[v[k]] - values_[v[0]];
    }
    pc.inverse = t.fullPivLu().inverse();
    pc.f0 = values_[v[0]];
    // f(x) = f0 + df^T T^{-1} (x - origin)
    pc.gradient = pc.inverse.transpose() * df;
    piece_of_[s] = static_cast<int>(pieces_.size());
    pieces_.push_back(std::move(pc));
    for (int k = 0; k <= d; ++k) incident_[v[k]].push_back(s);
  }

  cloud_ = PointCloud(d);
  vertex_of_.clear();
  for (std::size_t i = 0; i < mesh_->vertex_count(); ++i) {
    if (incident_[i].empty()) continue;
    cloud_.push_back(mesh_->vertex(static_cast<int>(i)));
    vertex_of_.push_back(static_cast<int>(i));
  }
}

Vector SimplicialInterpolant::lambda(int cell, const Vector& x) const {
  const Piece& pc = piece(cell);
  const Vector tail = pc.inverse * (x - pc.origin);
  Vector l(tail.size() + 1);
  l[0] = 1.0 - tail.sum();
  l.tail(tail.size()) = tail;
  return l;
}

double SimplicialInterpolant::eval_piece(int cell, const Vector& x) const {
  const Piece& pc = piece(cell);
  return pc.f0 + pc.gradient.dot(x - pc.origin);
}

int SimplicialInterpolant::containing(const Vector& x, int* hint) const {
  const int start = hint ? *hint : -1;
  const int cell = mesh_->locate(x, start);
  if (cell < 0) return -1;
  if (hint) *hint = cell;
  if (!mesh_->is_ghost(cell)) return cell;
  // x may sit on the hull boundary; try the real neighbours of the ghost
  for (int k = 0; k <= mesh_->dim(); ++k) {
    const int nb = mesh_->neighbor(cell, k);
    if (nb >= 0 && !mesh_->is_ghost(nb) && min_coeff(lambda(nb, x)) >= -kHullTol) return nb;
  }
  return -1;
}

int SimplicialInterpolant::nearest_piece(const Vector& x, double* min_lambda) const {
  const simd::Nearest nn = simd::nearest(x.data(), cloud_.view(), 0, cloud_.size());
  const int v = vertex_of_[nn.index];
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int s : incident_[v]) {
    const double m = min_coeff(lambda(s, x));
    if (m > best_min) {
      best_min = m;
      best = s;
    }
  }
  if (min_lambda) *min_lambda = best_min;
  return best;
}

std::optional<double> SimplicialInterpolant::interpolate(const Vector& x) const {
  int cell = containing(x, nullptr);
  if (cell < 0) {
    double m = 0.0;
    const int s = nearest_piece(x, &m);
    if (m < -kHullTol) return std::nullopt;
    cell = s;
  }
  return eval_piece(cell, x);
}

ValueGradient SimplicialInterpolant::extended(const Vector& x, int* hint) const {
  ValueGradient out;
  const int cell = containing(x, hint);
  if (cell >= 0) {
    out.value = eval_piece(cell, x);
    out.gradient = piece(cell).gradient;
    return out;
  }
  // the nearest simplex's affine piece, continued past the hull
  const int s = nearest_piece(x, nullptr);
  out.value = eval_piece(s, x);
  out.gradient = piece(s).gradient;
  out.inside = false;
  return out;
}

}  // namespace regionmap::approx
