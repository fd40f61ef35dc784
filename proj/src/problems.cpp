#include "regionmap/problems.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <deque>
#include <numbers>

namespace regionmap {

Problem::Problem(std::string name, Box bounds, Objective objective)
    : name_(std::move(name)),
      bounds_(std::move(bounds)),
      objective_(std::move(objective)),
      counter_(std::make_unique<std::atomic<std::uint64_t>>(0)) {
  if (!objective_) throw InvalidArgument("problem needs an objective");
}

double Problem::evaluate(const Vector& x) const {
  counter_->fetch_add(1);
  return objective_(x);
}

EvaluatedPoint Problem::evaluate_point(const Vector& x) const {
  const std::uint64_t idx = counter_->fetch_add(1);
  return EvaluatedPoint{x, objective_(x), idx};
}

bool EvalBudget::try_consume() {
  std::uint64_t cur = used_.load();
  while (cur < limit_) {
    if (used_.compare_exchange_weak(cur, cur + 1)) return true;
  }
  return false;
}

std::uint64_t EvalBudget::remaining() const {
  const std::uint64_t u = used_.load();
  return u >= limit_ ? 0 : limit_ - u;
}

std::optional<EvaluatedPoint> Evaluator::operator()(const Vector& x) const {
  if (!budget_->try_consume()) return std::nullopt;
  return problem_->evaluate_point(x);
}

double gaussian_valley(const Vector& x, const Vector& x0, const Vector& r) {
  if (x.size() != x0.size() || x.size() != r.size()) {
    throw InvalidArgument("gaussian_valley: dimension mismatch");
  }
  double q = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(r[i] > 0.0)) throw InvalidArgument("gaussian_valley: radii must be positive");
    const double d = x[i] - x0[i];
    q += d * d / (r[i] * r[i]);
  }
  return 1.0 - std::exp(-std::numbers::ln2 * q);
}

namespace {

const Vector& lobe_center(int k) {
  static const std::array<Vector, 3> centers = {Vector{{-0.8, 0.0}}, Vector{{0.0, -0.8}},
                                                Vector{{0.8, 0.0}}};
  return centers[k];
}

const Vector& lobe_radii(int k) {
  static const std::array<Vector, 3> radii = {Vector{{0.5, 1.0}}, Vector{{1.0, 0.5}},
                                              Vector{{0.5, 1.0}}};
  return radii[k];
}

Vector rotate(const Vector& x, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return Vector{{x[0] * c - x[1] * s, x[0] * s + x[1] * c}};
}

double tiled_product(const Vector& x, int tiles) {
  double h = 1.0;
  Vector offset(2);
  for (int i = 0; i < tiles; ++i) {
    for (int j = 0; j < tiles; ++j) {
      offset << x[0] - (2.0 + 4.0 * i), x[1] - (2.0 + 4.0 * j);
      h *= c_shape(offset, tile_rotation(i, j));
    }
  }
  return h;
}

double rastrigin_like(const Vector& x) {
  double s = std::cos(std::numbers::pi * x[0] / 5.0);
  for (int i = 1; i < 4; ++i) s += std::cos(std::numbers::pi * x[i]);
  return 2.0 - 0.5 * s;
}

}  // namespace

double c_shape(const Vector& x, double phi) {
  if (x.size() != 2) throw InvalidArgument("c_shape: point must be 2-dimensional");
  const Vector y = rotate(x, phi);
  double v = 1.0;
  for (int k = 0; k < 3; ++k) v *= gaussian_valley(y, lobe_center(k), lobe_radii(k));
  return v;
}

double flatten(double v, double threshold) {
  if (!(threshold < 1.0)) throw InvalidArgument("flatten: threshold must be < 1");
  return std::max((v - threshold) / (1.0 - threshold), 0.0);
}

BenchmarkCase parse_case(std::string_view label) {
  if (label == "I" || label == "1") return BenchmarkCase::I;
  if (label == "II" || label == "2") return BenchmarkCase::II;
  if (label == "III" || label == "3") return BenchmarkCase::III;
  throw InvalidArgument("unknown benchmark case '" + std::string(label) + "'");
}

std::string_view case_label(BenchmarkCase c) {
  switch (c) {
    case BenchmarkCase::I: return "I";
    case BenchmarkCase::II: return "II";
    case BenchmarkCase::III: return "III";
  }
  return "?";
}

bool CoverageEllipse::contains(const Vector& x) const {
  const Vector local = rotate(x - center, rotation);
  double q = 0.0;
  for (Eigen::Index i = 0; i < local.size(); ++i) {
    const double t = local[i] / semiaxes[i];
    q += t * t;
  }
  return q <= 1.0;
}

double tile_rotation(int i, int j) { return std::numbers::pi / 2.0 * ((i + j) % 4); }

namespace {

GroundTruth tiled_truth(int tiles, double axis_scale) {
  GroundTruth truth;
  for (int i = 0; i < tiles; ++i) {
    for (int j = 0; j < tiles; ++j) {
      Region region;
      region.center = Vector{{2.0 + 4.0 * i, 2.0 + 4.0 * j}};
      const double theta = tile_rotation(i, j);
      for (int k = 0; k < 3; ++k) {
        // the factor vanishes where Rot(theta)(x - c) hits the lobe centre
        CoverageEllipse e;
        e.center = region.center + rotate(lobe_center(k), -theta);
        e.semiaxes = lobe_radii(k) * axis_scale;
        e.rotation = theta;
        region.ellipses.push_back(std::move(e));
      }
      truth.regions.push_back(std::move(region));
    }
  }
  return truth;
}

}  // namespace

Benchmark benchmark(BenchmarkCase c, double ellipse_axis_scale) {
  switch (c) {
    case BenchmarkCase::I: {
      Problem p("f1", Box(Vector::Zero(2), Vector::Constant(2, 6.0)),
                [](const Vector& x) { return flatten(tiled_product(x, 2), 0.1); });
      return Benchmark{std::move(p), tiled_truth(2, ellipse_axis_scale)};
    }
    case BenchmarkCase::II: {
      Problem p("f2", Box(Vector::Zero(2), Vector::Constant(2, 20.0)),
                [](const Vector& x) { return flatten(tiled_product(x, 5), 0.1); });
      return Benchmark{std::move(p), tiled_truth(5, ellipse_axis_scale)};
    }
    case BenchmarkCase::III: {
      Problem p("f3", Box(Vector{{-5.0, -2.0, -2.0, -2.0}}, Vector{{5.0, 2.0, 2.0, 2.0}}),
                rastrigin_like);
      GroundTruth truth;
      const double grid[3] = {-2.0, 0.0, 2.0};
      for (double a : grid) {
        for (double b : grid) {
          for (double d : grid) {
            Vector m{{0.0, a, b, d}};
            truth.minima.push_back(m);
            Region r;
            r.center = m;
            truth.regions.push_back(std::move(r));
          }
        }
      }
      return Benchmark{std::move(p), std::move(truth)};
    }
  }
  throw InvalidArgument("unknown benchmark case");
}

std::size_t LatticeRange::total() const {
  std::size_t n = 1;
  for (long c : count) n *= static_cast<std::size_t>(std::max(c, 0L));
  return n;
}

LatticeRange lattice_range(const Vector& origin, double step, const Box& box) {
  if (!(step > 0.0)) throw InvalidArgument("lattice step must be positive");
  LatticeRange r;
  const auto d = static_cast<std::size_t>(origin.size());
  r.first.resize(d);
  r.count.resize(d);
  for (std::size_t a = 0; a < d; ++a) {
    const double lo = (box.lower[a] - origin[a]) / step;
    const double hi = (box.upper[a] - origin[a]) / step;
    const long k0 = static_cast<long>(std::ceil(lo - 1e-9));
    const long k1 = static_cast<long>(std::floor(hi + 1e-9));
    r.first[a] = k0;
    r.count[a] = std::max(0L, k1 - k0 + 1);
  }
  return r;
}

Vector lattice_point(const Vector& origin, double step, const LatticeRange& range,
                     std::size_t flat_index) {
  Vector x(origin.size());
  for (Eigen::Index a = origin.size() - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(range.count[a]);
    const auto k = static_cast<long>(flat_index % n);
    flat_index /= n;
    x[a] = origin[a] + step * static_cast<double>(range.first[a] + k);
  }
  return x;
}

namespace {

// Labels face-connected components of `mask` over the lattice; returns, per
// lattice cell, its component id or -1.
std::vector<int> label_components(const std::vector<char>& mask, const LatticeRange& range,
                                  int* count) {
  const std::size_t n = mask.size();
  const auto d = range.count.size();
  std::vector<std::size_t> stride(d);
  std::size_t s = 1;
  for (std::size_t a = d; a-- > 0;) {
    stride[a] = s;
    s *= static_cast<std::size_t>(range.count[a]);
  }
  std::vector<int> label(n, -1);
  int next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < n; ++start) {
    if (!mask[start] || label[start] >= 0) continue;
    label[start] = next;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      for (std::size_t a = 0; a < d; ++a) {
        const auto k = static_cast<long>((cur / stride[a]) % static_cast<std::size_t>(range.count[a]));
        if (k > 0) {
          const std::size_t nb = cur - stride[a];
          if (mask[nb] && label[nb] < 0) {
            label[nb] = next;
            queue.push_back(nb);
          }
        }
        if (k + 1 < range.count[a]) {
          const std::size_t nb = cur + stride[a];
          if (mask[nb] && label[nb] < 0) {
            label[nb] = next;
            queue.push_back(nb);
          }
        }
      }
    }
    ++next;
  }
  *count = next;
  return label;
}

}  // namespace

std::vector<PointCloud> exact_region_points(const Problem& problem, double cutoff,
                                            double grid_step) {
  if (!(cutoff > 0.0)) throw InvalidArgument("cutoff must be positive");
  const Box& box = problem.bounds();
  const LatticeRange range = lattice_range(box.lower, grid_step, box);
  const std::size_t n = range.total();
  std::vector<char> mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    mask[i] = problem.objective()(lattice_point(box.lower, grid_step, range, i)) < cutoff;
  }
  int count = 0;
  const std::vector<int> label = label_components(mask, range, &count);
  std::vector<PointCloud> out(static_cast<std::size_t>(count), PointCloud(problem.dimension()));
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) out[label[i]].push_back(lattice_point(box.lower, grid_step, range, i));
  }
  return out;
}

std::vector<PointCloud> exact_region_points_around(const Problem& problem,
                                                   const std::vector<Vector>& centers,
                                                   double radius, double cutoff,
                                                   double grid_step) {
  if (!(cutoff > 0.0)) throw InvalidArgument("cutoff must be positive");
  const Box& domain = problem.bounds();
  std::vector<PointCloud> out;
  for (const Vector& c : centers) {
    Box local;
    local.lower = c.array() - radius;
    local.upper = c.array() + radius;
    local = local.intersect(domain);
    const LatticeRange range = lattice_range(domain.lower, grid_step, local);
    const std::size_t n = range.total();
    std::vector<char> mask(n);
    std::size_t nearest = 0;
    double nearest_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const Vector x = lattice_point(domain.lower, grid_step, range, i);
      mask[i] = problem.objective()(x) < cutoff;
      const double d = (x - c).squaredNorm();
      if (d < nearest_d) {
        nearest_d = d;
        nearest = i;
      }
    }
    int count = 0;
    const std::vector<int> label = label_components(mask, range, &count);
    PointCloud cloud(problem.dimension());
    const int want = n > 0 ? label[nearest] : -1;
    if (want >= 0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (label[i] == want) cloud.push_back(lattice_point(domain.lower, grid_step, range, i));
      }
    }
    out.push_back(std::move(cloud));
  }
  return out;
}

}  // namespace regionmap
