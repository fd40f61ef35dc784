#include "regionmap/core.hpp"

#include <algorithm>
#include <limits>

namespace regionmap {

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InvalidArgument("box bounds must have equal nonzero dimension");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw InvalidArgument("box requires lower < upper on every axis");
  }
}

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  }
  return true;
}

Vector Box::clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

Box Box::inflated(double fraction) const {
  Vector pad = extent() * fraction;
  Box out;
  out.lower = lower - pad;
  out.upper = upper + pad;
  return out;
}

Box Box::intersect(const Box& other) const {
  Box out;
  out.lower = lower.cwiseMax(other.lower);
  out.upper = upper.cwiseMin(other.upper);
  return out;
}

Box Box::bounding(const std::vector<EvaluatedPoint>& points) {
  if (points.empty()) throw InvalidArgument("bounding box of an empty set");
  Box out;
  out.lower = points.front().x;
  out.upper = points.front().x;
  for (const auto& p : points) {
    out.lower = out.lower.cwiseMin(p.x);
    out.upper = out.upper.cwiseMax(p.x);
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double euclidean(const Vector& a, const Vector& b) { return (a - b).norm(); }

}  // namespace regionmap
