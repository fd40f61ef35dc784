#include "regionmap/approx/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regionmap/approx/interpolant.hpp"

namespace regionmap::approx {

namespace {

constexpr double kNuggetStart = 1e-8;
constexpr double kNuggetMax = 1e-2;
constexpr double kMinRcond = 1e-15;

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Vector KrigingModel::kernel_column(const Vector& x) const {
  const std::size_t n = values_.size();
  Vector k(static_cast<Eigen::Index>(n));
  simd::squared_distances(x.data(), cloud_.view(), 0, n, k.data());
  const double scale = -0.5 / (length_ * length_);
  for (Eigen::Index i = 0; i < k.size(); ++i) k[i] = std::exp(scale * k[i]);
  return k;
}

bool KrigingModel::solve(double nugget) {
  const std::size_t n = values_.size();
  const auto en = static_cast<Eigen::Index>(n);
  Matrix k(en, en);
  std::vector<double> row(n);
  const double scale = -0.5 / (length_ * length_);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector xi = cloud_.point(i);
    simd::squared_distances(xi.data(), cloud_.view(), 0, n, row.data());
    for (std::size_t j = 0; j < n; ++j) k(i, j) = std::exp(scale * row[j]);
    k(i, i) += nugget;
  }
  chol_.compute(k);
  if (chol_.info() != Eigen::Success || chol_.rcond() < kMinRcond) return false;
  const Vector y = Eigen::Map<const Vector>(values_.data(), en);
  const Vector one = Vector::Ones(en);
  kinv_one_ = chol_.solve(one);
  one_kinv_one_ = one.dot(kinv_one_);
  if (!(one_kinv_one_ > 0.0) || !std::isfinite(one_kinv_one_)) return false;
  const Vector kinv_y = chol_.solve(y);
  beta_ = one.dot(kinv_y) / one_kinv_one_;
  alpha_ = kinv_y - beta_ * kinv_one_;
  nugget_ = nugget;
  if (!alpha_.allFinite()) return false;
  abs_alpha_sum_ = alpha_.cwiseAbs().sum();
  return true;
}

std::vector<char> KrigingModel::grid_at_or_below(const std::vector<std::vector<double>>& axes,
                                                 double level) const {
  const int d = cloud_.dim();
  if (static_cast<int>(axes.size()) != d) throw InvalidArgument("kriging grid: wrong axis count");
  const std::size_t n = values_.size();
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.size();
  std::vector<char> mask(total, 0);
  if (total == 0) return mask;

  // table[a][j * n + i] = exp(-(axes[a][j] - p_i[a])^2 / (2 l^2))
  const double scale = -0.5 / (length_ * length_);
  std::vector<std::vector<double>> table(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const auto& col = cloud_.column(a);
    auto& t = table[a];
    t.resize(axes[a].size() * n);
    for (std::size_t j = 0; j < axes[a].size(); ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const double z = axes[a][j] - col[i];
        t[j * n + i] = std::exp(scale * z * z);
      }
    }
  }
  // products of the tables are within a few ulps of the joint exponential
  const double margin = 1e-12 * (std::abs(beta_) + abs_alpha_sum_);

  // partial[a] holds alpha_i times the factors of axes 0..a-1
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(d), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) partial[0][i] = alpha_[static_cast<Eigen::Index>(i)];
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  Vector x(d);
  std::size_t flat = 0;
  int a = 0;
  while (true) {
    if (a < d - 1) {
      const double* t = table[a].data() + idx[a] * n;
      const double* src = partial[a].data();
      double* dst = partial[a + 1].data();
      for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] * t[i];
      ++a;
      continue;
    }
    const double* src = partial[a].data();
    for (std::size_t j = 0; j < axes[a].size(); ++j, ++flat) {
      const double* t = table[a].data() + j * n;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += src[i] * t[i];
      const double value = beta_ + s;
      if (value + margin < level) {
        mask[flat] = 1;
      } else if (!(value - margin > level)) {
        idx[a] = j;
        for (int b = 0; b < d; ++b) x[b] = axes[b][idx[b]];
        mask[flat] = predict(x) <= level;
      }
    }
    // advance the outer odometer
    idx[a] = 0;
    --a;
    while (a >= 0 && ++idx[a] == axes[a].size()) {
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return mask;
}

KrigingModel KrigingModel::fit(const std::vector<Vector>& points, const std::vector<double>& values) {
  std::vector<Vector> p = points;
  std::vector<double> v = values;
  merge_duplicates(p, v);
  if (p.size() < 2) throw InvalidArgument("kriging needs at least two distinct points");
  const int d = static_cast<int>(p.front().size());

  KrigingModel m;
  m.cloud_ = PointCloud::from(p, d);
  m.values_ = std::move(v);
  std::vector<double> nn(p.size());
  const std::size_t n = p.size();
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    simd::squared_distances(p[i].data(), m.cloud_.view(), 0, n, row.data());
    row[i] = std::numeric_limits<double>::infinity();
    nn[i] = std::sqrt(*std::min_element(row.begin(), row.end()));
  }
  m.length_ = median(nn);
  for (double nugget = kNuggetStart; nugget <= kNuggetMax * (1.0 + 1e-9); nugget *= 10.0) {
    if (m.solve(nugget)) return m;
  }
  throw ConditioningError("kriging: covariance matrix singular even with the largest nugget");
}

KrigingModel KrigingModel::from_parts(const std::vector<Vector>& points, const std::vector<double>& values,
                                      double length_scale, double nugget) {
  if (points.size() != values.size() || points.size() < 2) throw InvalidArgument("kriging: bad parts");
  if (!(length_scale > 0.0) || !(nugget > 0.0)) throw InvalidArgument("kriging: bad hyperparameters");
  KrigingModel m;
  m.cloud_ = PointCloud::from(points, static_cast<int>(points.front().size()));
  m.values_ = values;
  m.length_ = length_scale;
  if (!m.solve(nugget)) throw ConditioningError("kriging: stored system is singular");
  return m;
}

double KrigingModel::predict(const Vector& x) const { return beta_ + kernel_column(x).dot(alpha_); }

Vector KrigingModel::weights(const Vector& x) const {
  const Vector k = kernel_column(x);
  const Vector kinv_k = chol_.solve(k);
  const double mu = (kinv_one_.dot(k) - 1.0) / one_kinv_one_;
  return kinv_k - mu * kinv_one_;
}

}  // namespace regionmap::approx
