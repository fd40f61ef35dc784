#include "regionmap/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace regionmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

RegionApproximation level_set(std::shared_ptr<const approx::Surrogate> surrogate,
                              const Cluster& cluster, double epsilon, double grid_step,
                              const Vector& origin) {
  if (!surrogate) throw InvalidArgument("level_set: no surrogate");
  if (!(epsilon > 0.0)) throw InvalidArgument("level_set: epsilon must be positive");
  if (!(grid_step > 0.0)) throw InvalidArgument("level_set: grid step must be positive");
  if (cluster.points.empty()) throw InvalidArgument("level_set: empty cluster");

  RegionApproximation out;
  out.epsilon = epsilon;
  out.grid_step = grid_step;
  double lowest = kInf;
  for (const auto& p : cluster.points) lowest = std::min(lowest, surrogate->value(p.x));
  out.level = lowest + epsilon;

  const Box& dom = surrogate->domain();
  const LatticeRange range = lattice_range(origin, grid_step, dom);
  out.points = PointCloud(dom.dim());
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(dom.dim()));
  for (int a = 0; a < dom.dim(); ++a) {
    for (long k = 0; k < range.count[a]; ++k) {
      axes[a].push_back(origin[a] + grid_step * static_cast<double>(range.first[a] + k));
    }
  }
  const std::vector<char> mask = surrogate->grid_at_or_below(axes, out.level);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.points.push_back(lattice_point(origin, grid_step, range, i));
  }
  out.surrogate = std::move(surrogate);
  return out;
}

// ---- grid index ------------------------------------------------------------

GridIndex::GridIndex(const PointCloud& points) : dim_(points.dim()) {
  const std::size_t n = points.size();
  if (dim_ < 1 || dim_ > simd::kMaxDim) throw InvalidArgument("GridIndex: bad dimension");
  sorted_ = PointCloud(dim_);
  start_.assign(2, 0);
  lower_ = Vector::Zero(dim_);
  cells_.fill(1);
  if (n == 0) return;

  Vector hi(dim_);
  for (int a = 0; a < dim_; ++a) {
    const auto& col = points.column(a);
    lower_[a] = *std::min_element(col.begin(), col.end());
    hi[a] = *std::max_element(col.begin(), col.end());
  }
  const double span = (hi - lower_).maxCoeff();
  const double per_axis = std::max(1.0, std::floor(std::pow(static_cast<double>(n), 1.0 / dim_)));
  cell_ = span > 0.0 ? span / per_axis : 1.0;
  std::size_t total = 1;
  for (int a = 0; a < dim_; ++a) {
    cells_[a] = static_cast<long>(std::floor((hi[a] - lower_[a]) / cell_)) + 1;
    total *= static_cast<std::size_t>(cells_[a]);
  }

  std::vector<std::size_t> key(n);
  std::array<long, simd::kMaxDim> c{};
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < dim_; ++a) c[a] = cell_of(a, points.coord(i, a));
    key[i] = flat(c);
  }
  start_.assign(total + 1, 0);
  for (std::size_t k : key) ++start_[k + 1];
  for (std::size_t k = 0; k < total; ++k) {
    if (start_[k + 1] > 0) ++occupied_;
    start_[k + 1] += start_[k];
  }
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) order[fill[key[i]]++] = i;
  sorted_.reserve(n);
  for (std::size_t i : order) sorted_.push_back(points.point(i));
}

long GridIndex::cell_of(int axis, double v) const {
  const long c = static_cast<long>(std::floor((v - lower_[axis]) / cell_));
  return std::clamp(c, 0L, cells_[axis] - 1);
}

std::size_t GridIndex::flat(const std::array<long, simd::kMaxDim>& c) const {
  std::size_t f = 0;
  for (int a = 0; a < dim_; ++a) f = f * static_cast<std::size_t>(cells_[a]) + static_cast<std::size_t>(c[a]);
  return f;
}

double GridIndex::scan_all(const double* query, double best, double enough) const {
  constexpr std::size_t kChunk = 256;
  const simd::ColumnView view = sorted_.view();
  for (std::size_t b = 0; b < sorted_.size(); b += kChunk) {
    const simd::Nearest nn = simd::nearest(query, view, b, std::min(b + kChunk, sorted_.size()));
    best = std::min(best, nn.sq_distance);
    if (best <= enough) break;
  }
  return best;
}

double GridIndex::nearest_sq(const double* query, double enough) const {
  if (sorted_.empty()) return kInf;
  const simd::ColumnView view = sorted_.view();
  std::array<long, simd::kMaxDim> qc{};
  long max_ring = 0;
  for (int a = 0; a < dim_; ++a) {
    // unclamped, so the ring lower bound stays valid for far queries
    qc[a] = static_cast<long>(std::floor((query[a] - lower_[a]) / cell_));
    max_ring = std::max({max_ring, std::abs(qc[a]), std::abs(cells_[a] - 1 - qc[a])});
  }

  double best = kInf;
  std::size_t visited = 0;
  std::array<long, simd::kMaxDim> lo{}, hi{}, c{};
  for (long r = 0; r <= max_ring; ++r) {
    bool any = true;
    for (int a = 0; a < dim_; ++a) {
      lo[a] = std::max(qc[a] - r, 0L);
      hi[a] = std::min(qc[a] + r, cells_[a] - 1);
      if (lo[a] > hi[a]) any = false;
    }
    if (any) {
      // odometer over the clipped cube, visiting only cells on the ring shell
      c = lo;
      while (true) {
        bool shell = false;
        for (int a = 0; a < dim_; ++a) {
          if (std::abs(c[a] - qc[a]) == r) shell = true;
        }
        if (shell) {
          const std::size_t f = flat(c);
          if (start_[f + 1] > start_[f]) {
            const simd::Nearest nn = simd::nearest(query, view, start_[f], start_[f + 1]);
            best = std::min(best, nn.sq_distance);
            if (best <= enough) return best;
          }
        } else if (dim_ > 0) {
          // interior in every axis but the last: jump to the far shell cell
          bool interior = true;
          for (int a = 0; a + 1 < dim_; ++a) {
            if (std::abs(c[a] - qc[a]) == r) interior = false;
          }
          if (interior && c[dim_ - 1] < qc[dim_ - 1] + r && c[dim_ - 1] > qc[dim_ - 1] - r) {
            c[dim_ - 1] = std::min(qc[dim_ - 1] + r, hi[dim_ - 1] + 1) - 1;
          }
        }
        if (++visited > 4 * occupied_ + 64) return scan_all(query, best, enough);
        int a = dim_ - 1;
        while (a >= 0 && ++c[a] > hi[a]) {
          c[a] = lo[a];
          --a;
        }
        if (a < 0) break;
      }
    }
    const double bound = static_cast<double>(r) * cell_;
    if (best <= bound * bound) return best;
  }
  return best;
}

double directed_hausdorff(const PointCloud& a, const GridIndex& b) {
  if (a.empty() || b.points().empty()) return kInf;
  double worst = 0.0;
  Vector q(a.dim());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int k = 0; k < a.dim(); ++k) q[k] = a.coord(i, k);
    const double d = b.nearest_sq(q.data(), worst);
    if (d > worst) worst = d;
  }
  return std::sqrt(worst);
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) return kInf;
  if (a.dim() != b.dim()) throw InvalidArgument("hausdorff: dimension mismatch");
  const GridIndex ia(a);
  const GridIndex ib(b);
  return std::max(directed_hausdorff(a, ib), directed_hausdorff(b, ia));
}

// ---- coverage --------------------------------------------------------------

double coverage_ratio(const std::vector<Cluster>& clusters, const GroundTruth& truth) {
  if (truth.regions.empty()) throw InvalidArgument("coverage_ratio: truth has no regions");
  int covered = 0;
  for (const Region& region : truth.regions) {
    const bool hit = std::any_of(clusters.begin(), clusters.end(), [&](const Cluster& c) {
      return std::all_of(region.ellipses.begin(), region.ellipses.end(), [&](const CoverageEllipse& e) {
        return std::any_of(c.points.begin(), c.points.end(),
                           [&](const EvaluatedPoint& p) { return e.contains(p.x); });
      });
    });
    if (hit) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(truth.regions.size());
}

double minima_coverage(const std::vector<Cluster>& clusters, const GroundTruth& truth) {
  if (truth.minima.empty()) throw InvalidArgument("minima_coverage: truth has no minima");
  int covered = 0;
  for (const Vector& m : truth.minima) {
    bool hit = false;
    for (const Cluster& c : clusters) {
      for (const auto& p : c.points) {
        if (euclidean(p.x, m) < truth.minima_radius) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(truth.minima.size());
}

int nearest_region(const Vector& x, const std::vector<PointCloud>& regions) {
  int best = -1;
  double best_d = kInf;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (regions[r].empty()) continue;
    const simd::Nearest nn = simd::nearest(x.data(), regions[r].view(), 0, regions[r].size());
    if (nn.sq_distance < best_d) {
      best_d = nn.sq_distance;
      best = static_cast<int>(r);
    }
  }
  return best;
}

// ---- export ----------------------------------------------------------------

void write_blocks(std::ostream& os, const std::vector<PointCloud>& blocks) {
  const auto old = os.precision(10);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b > 0) os << '\n';
    const PointCloud& pc = blocks[b];
    for (std::size_t i = 0; i < pc.size(); ++i) {
      for (int a = 0; a < pc.dim(); ++a) os << (a ? " " : "") << pc.coord(i, a);
      os << '\n';
    }
  }
  os.precision(old);
}

std::vector<Segment> marching_squares(const std::vector<double>& values, long nx, long ny,
                                      const Vector& origin, double step, double level) {
  if (origin.size() != 2) throw InvalidArgument("marching_squares: 2D only");
  if (static_cast<long>(values.size()) != nx * ny) throw InvalidArgument("marching_squares: size mismatch");
  std::vector<Segment> out;
  auto at = [&](long i, long j) { return values[static_cast<std::size_t>(i * ny + j)]; };
  auto point = [&](double i, double j) {
    Vector p(2);
    p << origin[0] + i * step, origin[1] + j * step;
    return p;
  };
  for (long i = 0; i + 1 < nx; ++i) {
    for (long j = 0; j + 1 < ny; ++j) {
      const double v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
      const int mask = (v00 < level) | (v10 < level) << 1 | (v11 < level) << 2 | (v01 < level) << 3;
      if (mask == 0 || mask == 15) continue;
      auto frac = [&](double a, double b) { return a == b ? 0.5 : (level - a) / (b - a); };
      // edges: 0 bottom (00-10), 1 right (10-11), 2 top (01-11), 3 left (00-01)
      auto edge = [&](int e) {
        switch (e) {
          case 0:
            return point(i + frac(v00, v10), j);
          case 1:
            return point(i + 1, j + frac(v10, v11));
          case 2:
            return point(i + frac(v01, v11), j + 1);
          default:
            return point(i, j + frac(v00, v01));
        }
      };
      auto emit = [&](int e1, int e2) { out.push_back(Segment{edge(e1), edge(e2)}); };
      const bool centre_inside = 0.25 * (v00 + v10 + v11 + v01) < level;
      switch (mask) {
        case 1: case 14: emit(3, 0); break;
        case 2: case 13: emit(0, 1); break;
        case 3: case 12: emit(3, 1); break;
        case 4: case 11: emit(1, 2); break;
        case 6: case 9: emit(0, 2); break;
        case 7: case 8: emit(3, 2); break;
        case 5:
          if (centre_inside) {
            emit(0, 1);
            emit(2, 3);
          } else {
            emit(3, 0);
            emit(1, 2);
          }
          break;
        case 10:
          if (centre_inside) {
            emit(3, 0);
            emit(1, 2);
          } else {
            emit(0, 1);
            emit(2, 3);
          }
          break;
        default:
          break;
      }
    }
  }
  return out;
}

std::vector<Segment> isolines(const approx::Surrogate& surrogate, double level, double grid_step,
                              const Vector& origin) {
  const Box& dom = surrogate.domain();
  if (dom.dim() != 2) throw InvalidArgument("isolines: 2D only");
  const LatticeRange range = lattice_range(origin, grid_step, dom);
  const std::size_t n = range.total();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = surrogate.value(lattice_point(origin, grid_step, range, i));
  Vector corner(2);
  corner << origin[0] + static_cast<double>(range.first[0]) * grid_step,
      origin[1] + static_cast<double>(range.first[1]) * grid_step;
  return marching_squares(values, range.count[0], range.count[1], corner, grid_step, level);
}

void write_segments(std::ostream& os, const std::vector<Segment>& segments) {
  const auto old = os.precision(10);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (s > 0) os << '\n';
    os << segments[s].a[0] << ' ' << segments[s].a[1] << '\n'
       << segments[s].b[0] << ' ' << segments[s].b[1] << '\n';
  }
  os.precision(old);
}

}  // namespace regionmap
