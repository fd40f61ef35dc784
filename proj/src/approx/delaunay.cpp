#include "regionmap/approx/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include <gmpxx.h>

namespace regionmap::approx {

namespace {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                                  kMaxSimplexDim + 1, kMaxSimplexDim + 1>;

constexpr double kSuperExtent = 1e3;
// |det| above this fraction of the Hadamard bound is trusted in floating point
constexpr double kFilter = 1e-10;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Row-major n x n, destroyed.
int exact_sign(std::vector<mpq_class>& m, int n) {
  int sign = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r) {
      if (sgn(m[r * n + c]) != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) return 0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m[piv * n + j], m[c * n + j]);
      sign = -sign;
    }
    sign *= sgn(m[c * n + c]);
    for (int r = c + 1; r < n; ++r) {
      if (sgn(m[r * n + c]) == 0) continue;
      const mpq_class f = m[r * n + c] / m[c * n + c];
      for (int j = c; j < n; ++j) m[r * n + j] -= f * m[c * n + j];
    }
  }
  return sign;
}

template <class M>
double hadamard(const M& a) {
  double h = 1.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) h *= a.row(r).norm();
  return h;
}

struct RidgeKey {
  std::array<int, kMaxSimplexDim> v{};
  int n = 0;
  bool operator==(const RidgeKey& o) const { return n == o.n && v == o.v; }
};

struct RidgeHash {
  std::size_t operator()(const RidgeKey& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (int i = 0; i < k.n; ++i) {
      h ^= static_cast<std::size_t>(k.v[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

Delaunay::Delaunay(const std::vector<Vector>& points) : points_(points) {
  if (points_.empty()) throw DegenerateGeometry("delaunay: no points");
  dim_ = static_cast<int>(points_.front().size());
  if (dim_ < 2 || dim_ > kMaxSimplexDim) throw InvalidArgument("delaunay: dimension out of range");
  const auto n = static_cast<int>(points_.size());
  if (n < dim_ + 1) throw DegenerateGeometry("delaunay: fewer than d+1 points");

  Matrix diffs(n - 1, dim_);
  for (int i = 1; i < n; ++i) diffs.row(i - 1) = (points_[i] - points_[0]).transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(diffs);
  qr.setThreshold(1e-10);
  if (qr.rank() < dim_) throw DegenerateGeometry("delaunay: points are affinely dependent");

  Vector lo = points_[0];
  Vector hi = points_[0];
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  // predicates run on the raw inputs; rescaling would round them
  const double scale = (hi - lo).maxCoeff();
  duplicate_tol_ = 1e-24 * scale * scale;

  // {x >= -M, sum(x + M) <= d * (1 + 2M)} contains the unit box with room to spare
  const double m = kSuperExtent;
  const double edge = dim_ * (1.0 + 2.0 * m);
  super_.assign(static_cast<std::size_t>(dim_ + 1), Vector::Constant(dim_, -m));
  for (int k = 1; k <= dim_; ++k) super_[k][k - 1] += edge;
  for (auto& s : super_) s = lo + scale * s;

  Cell root;
  for (int k = 0; k <= dim_; ++k) {
    root.v[k] = n + k;
    root.nb[k] = -1;
  }
  if (orient(root.v) < 0) std::swap(root.v[0], root.v[1]);
  cells_.push_back(root);
  Vector center = Vector::Zero(dim_);
  for (const auto& s : super_) center += s;
  center /= dim_ + 1.0;
  insphere_sign_ = insphere(root.v, center, -1);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 shuffle_rng(0x5eed);
  std::shuffle(order.begin(), order.end(), shuffle_rng);
  int hint = 0;
  for (int vid : order) insert(vid, hint);

  for (int s = 0; s < static_cast<int>(cells_.size()); ++s) {
    if (cells_[s].alive && !is_ghost(s)) real_.push_back(s);
  }
  std::sort(skipped_.begin(), skipped_.end());
}

const Vector& Delaunay::coord(int i) const {
  const auto n = static_cast<int>(points_.size());
  return i < n ? points_[i] : super_[i - n];
}

bool Delaunay::is_ghost(int s) const {
  const auto n = static_cast<int>(points_.size());
  for (int k = 0; k <= dim_; ++k) {
    if (cells_[s].v[k] >= n) return true;
  }
  return false;
}

int Delaunay::orient(const std::array<const Vector*, kMaxSimplexDim + 1>& q) const {
  SmallMatrix a(dim_, dim_);
  for (int k = 1; k <= dim_; ++k) a.row(k - 1) = (*q[k] - *q[0]).transpose();
  const double det = a.determinant();
  if (std::abs(det) > kFilter * hadamard(a)) return sign_of(det);
  std::vector<mpq_class> m(static_cast<std::size_t>(dim_ * dim_));
  for (int k = 1; k <= dim_; ++k) {
    for (int j = 0; j < dim_; ++j) {
      m[(k - 1) * dim_ + j] = mpq_class((*q[k])[j]) - mpq_class((*q[0])[j]);
    }
  }
  return exact_sign(m, dim_);
}

int Delaunay::orient(const Simplex& v) const {
  std::array<const Vector*, kMaxSimplexDim + 1> q{};
  for (int k = 0; k <= dim_; ++k) q[k] = &coord(v[k]);
  return orient(q);
}

int Delaunay::insphere(const Simplex& v, const Vector& p, int pid) const {
  SmallMatrix a(dim_ + 1, dim_ + 1);
  for (int k = 0; k <= dim_; ++k) {
    const Vector d = coord(v[k]) - p;
    a.row(k).head(dim_) = d.transpose();
    a(k, dim_) = d.squaredNorm();
  }
  const double det = a.determinant();
  if (std::abs(det) > kFilter * hadamard(a)) return sign_of(det);

  // lifted rows [x, |x|^2, 1]; equal to the translated form above
  const int n = dim_ + 2;
  std::array<int, kMaxSimplexDim + 2> ids{};
  std::array<const Vector*, kMaxSimplexDim + 2> rows{};
  for (int k = 0; k <= dim_; ++k) {
    ids[k] = v[k];
    rows[k] = &coord(v[k]);
  }
  ids[dim_ + 1] = pid;
  rows[dim_ + 1] = &p;
  std::vector<mpq_class> lifted(static_cast<std::size_t>(n * n));
  for (int r = 0; r < n; ++r) {
    mpq_class h = 0;
    for (int j = 0; j < dim_; ++j) {
      const mpq_class x((*rows[r])[j]);
      lifted[r * n + j] = x;
      h += x * x;
    }
    lifted[r * n + dim_] = h;
    lifted[r * n + dim_ + 1] = 1;
  }
  std::vector<mpq_class> m = lifted;
  const int exact = exact_sign(m, n);
  if (exact != 0 || pid < 0) return exact;

  // symbolic perturbation: heights raised by eps^(1/id), larger ids dominate
  std::array<int, kMaxSimplexDim + 2> order{};
  std::iota(order.begin(), order.begin() + n, 0);
  std::sort(order.begin(), order.begin() + n, [&](int x, int y) { return ids[x] > ids[y]; });
  for (int t = 0; t < n; ++t) {
    m = lifted;
    for (int r = 0; r < n; ++r) m[r * n + dim_] = r == order[t] ? 1 : 0;
    const int c = exact_sign(m, n);
    if (c != 0) return c;
  }
  return 0;
}

int Delaunay::walk(const Vector& p, int start) const {
  int cur = start;
  if (cur < 0 || cur >= static_cast<int>(cells_.size()) || !cells_[cur].alive) {
    cur = -1;
    for (int s = static_cast<int>(cells_.size()) - 1; s >= 0; --s) {
      if (cells_[s].alive) {
        cur = s;
        break;
      }
    }
  }
  std::uint32_t lcg = 0x9e3779b9u;
  const std::size_t max_steps = 4 * cells_.size() + 64;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const Cell& c = cells_[cur];
    lcg = lcg * 1664525u + 1013904223u;
    const int offset = static_cast<int>(lcg >> 16) % (dim_ + 1);
    int next = -2;
    for (int t = 0; t <= dim_; ++t) {
      const int k = (t + offset) % (dim_ + 1);
      // p stands in for vertex k: negative orientation means p lies beyond facet k
      std::array<const Vector*, kMaxSimplexDim + 1> q{};
      for (int j = 0; j <= dim_; ++j) q[j] = j == k ? &p : &coord(c.v[j]);
      if (orient(q) < 0) {
        next = c.nb[k];
        break;
      }
    }
    if (next == -2) return cur;
    if (next == -1) return -1;
    cur = next;
  }
  // walk did not settle; fall back to a scan
  for (int s = 0; s < static_cast<int>(cells_.size()); ++s) {
    if (!cells_[s].alive) continue;
    bool inside = true;
    for (int k = 0; k <= dim_ && inside; ++k) {
      std::array<const Vector*, kMaxSimplexDim + 1> q{};
      for (int j = 0; j <= dim_; ++j) q[j] = j == k ? &p : &coord(cells_[s].v[j]);
      inside = orient(q) >= 0;
    }
    if (inside) return s;
  }
  return -1;
}

void Delaunay::insert(int vid, int& hint) {
  const Vector& p = points_[vid];
  const int start = walk(p, hint);
  if (start < 0) throw DegenerateGeometry("delaunay: point escaped the super-simplex");
  const auto n_real = static_cast<int>(points_.size());
  for (int k = 0; k <= dim_; ++k) {
    const int v = cells_[start].v[k];
    if (v < n_real && (points_[v] - p).squaredNorm() < duplicate_tol_) {
      skipped_.push_back(vid);
      return;
    }
  }

  std::vector<int> cavity{start};
  std::vector<char> in_cavity(cells_.size(), 0);
  std::vector<char> tested(cells_.size(), 0);
  in_cavity[start] = tested[start] = 1;
  for (std::size_t q = 0; q < cavity.size(); ++q) {
    const Cell& c = cells_[cavity[q]];
    for (int k = 0; k <= dim_; ++k) {
      const int nb = c.nb[k];
      if (nb < 0 || tested[nb]) continue;
      tested[nb] = 1;
      if (insphere_sign_ * insphere(cells_[nb].v, p, vid) > 0) {
        in_cavity[nb] = 1;
        cavity.push_back(nb);
      }
    }
  }

  struct Facet {
    Simplex v;
    int k;
    int outside;
    // slot in the outside cell that points back into the cavity
    int back;
  };
  std::vector<Facet> facets;
  for (int c : cavity) {
    for (int k = 0; k <= dim_; ++k) {
      const int nb = cells_[c].nb[k];
      if (nb >= 0 && in_cavity[nb]) continue;
      int back = -1;
      if (nb >= 0) {
        for (int j = 0; j <= dim_; ++j) {
          if (cells_[nb].nb[j] == c) back = j;
        }
      }
      facets.push_back(Facet{cells_[c].v, k, nb, back});
    }
  }

  std::vector<int> free_slots = cavity;
  for (int c : cavity) cells_[c].alive = false;

  std::unordered_map<RidgeKey, std::pair<int, int>, RidgeHash> ridges;
  ridges.reserve(facets.size() * static_cast<std::size_t>(dim_));
  int last = -1;
  for (const Facet& f : facets) {
    Cell cell;
    cell.v = f.v;
    cell.v[f.k] = vid;
    cell.nb.fill(-1);
    cell.nb[f.k] = f.outside;
    int slot;
    if (!free_slots.empty()) {
      slot = free_slots.back();
      free_slots.pop_back();
      cells_[slot] = cell;
    } else {
      slot = static_cast<int>(cells_.size());
      cells_.push_back(cell);
    }
    if (f.outside >= 0) cells_[f.outside].nb[f.back] = slot;
    for (int j = 0; j <= dim_; ++j) {
      if (j == f.k) continue;
      RidgeKey key;
      for (int t = 0; t <= dim_; ++t) {
        if (t != j && t != f.k) key.v[key.n++] = cell.v[t];
      }
      std::sort(key.v.begin(), key.v.begin() + key.n);
      auto [it, fresh] = ridges.try_emplace(key, slot, j);
      if (!fresh) {
        cells_[slot].nb[j] = it->second.first;
        cells_[it->second.first].nb[it->second.second] = slot;
      }
    }
    last = slot;
  }
  hint = last;
}

int Delaunay::locate(const Vector& x, int hint) const {
  return walk(x, hint);
}

Vector Delaunay::barycentric(int s, const Vector& x) const {
  const Cell& c = cells_[s];
  const Vector& o = coord(c.v[0]);
  Matrix t(dim_, dim_);
  for (int k = 1; k <= dim_; ++k) t.col(k - 1) = coord(c.v[k]) - o;
  const Vector tail = t.partialPivLu().solve(x - o);
  Vector lambda(dim_ + 1);
  lambda[0] = 1.0 - tail.sum();
  lambda.tail(dim_) = tail;
  return lambda;
}

bool Delaunay::empty_circumsphere_check() const {
  for (int s : real_) {
    const Cell& c = cells_[s];
    for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
      if (std::find(c.v.begin(), c.v.begin() + dim_ + 1, i) != c.v.begin() + dim_ + 1) continue;
      if (std::binary_search(skipped_.begin(), skipped_.end(), i)) continue;
      if (insphere_sign_ * insphere(c.v, points_[i], -1) > 0) return false;
    }
  }
  return true;
}

}  // namespace regionmap::approx
