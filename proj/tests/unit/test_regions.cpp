#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "regionmap/regions.hpp"

using namespace regionmap;

namespace {

PointCloud random_cloud(Rng& rng, int n, int d, double spread) {
  std::uniform_real_distribution<double> u(0, spread);
  PointCloud c(d);
  for (int i = 0; i < n; ++i) {
    Vector x(d);
    for (int k = 0; k < d; ++k) x[k] = u(rng);
    c.push_back(x);
  }
  return c;
}

double brute_hausdorff(const PointCloud& a, const PointCloud& b) {
  auto directed = [](const PointCloud& p, const PointCloud& q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < q.size(); ++j) {
        double s = 0.0;
        for (int k = 0; k < p.dim(); ++k) {
          const double t = q.coord(j, k) - p.coord(i, k);
          s += t * t;
        }
        best = std::min(best, s);
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST_CASE("hausdorff equals the quadratic oracle exactly") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const int d = 2 + t % 3;
    // mix of overlapping and clustered sets, including one-point sets
    const auto a = random_cloud(rng, 1 + t * 3, d, 1.0 + t % 4);
    const auto b = random_cloud(rng, 1 + (t * 7) % 150, d, 0.5);
    CHECK(hausdorff(a, b) == brute_hausdorff(a, b));
  }
}

TEST_CASE("hausdorff metric axioms") {
  Rng rng(32);
  for (int t = 0; t < 30; ++t) {
    const auto a = random_cloud(rng, 20, 2, 1);
    const auto b = random_cloud(rng, 25, 2, 2);
    const auto c = random_cloud(rng, 15, 2, 3);
    CHECK(hausdorff(a, a) == 0.0);
    CHECK(hausdorff(a, b) == hausdorff(b, a));
    CHECK(hausdorff(a, b) >= 0.0);
    CHECK(hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-12);
  }
  CHECK(std::isinf(hausdorff(PointCloud(2), random_cloud(rng, 3, 2, 1))));
}

TEST_CASE("grid index nearest matches brute force") {
  Rng rng(33);
  const auto pts = random_cloud(rng, 500, 3, 1);
  GridIndex index(pts);
  std::uniform_real_distribution<double> u(-1, 2);
  for (int t = 0; t < 200; ++t) {
    double q[3] = {u(rng), u(rng), u(rng)};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (pts.coord(i, k) - q[k]) * (pts.coord(i, k) - q[k]);
      best = std::min(best, s);
    }
    CHECK(index.nearest_sq(q) == best);
  }
}

TEST_CASE("level sets grow with epsilon") {
  Rng rng(34);
  std::uniform_real_distribution<double> u(0, 2);
  for (int t = 0; t < 20; ++t) {
    Cluster cl;
    const Vector c = v2(u(rng), u(rng));
    for (int i = 0; i < 25; ++i) {
      const Vector x = v2(u(rng), u(rng));
      cl.points.push_back(EvaluatedPoint{x, (x - c).squaredNorm(), static_cast<std::uint64_t>(i)});
    }
    const Box dom(Vector::Zero(2), Vector::Constant(2, 2));
    const auto m = t % 3 == 0 ? approx::Method::kriging : (t % 3 == 1 ? approx::Method::L2 : approx::Method::H1);
    auto fit = approx::fit_surrogate(cl, m, approx::GridSpec{}, dom);
    auto s = std::make_shared<const approx::Surrogate>(fit.surrogate);
    std::size_t prev = 0;
    PointCloud prev_pts(2);
    for (double eps : {0.01, 0.05, 0.1, 0.3, 1.0}) {
      const auto r = level_set(s, cl, eps, 0.05, Vector::Zero(2));
      CHECK(r.points.size() >= prev);
      // each smaller set is contained in the larger
      if (!prev_pts.empty()) {
        GridIndex idx(r.points);
        for (std::size_t i = 0; i < prev_pts.size(); ++i) {
          const Vector p = prev_pts.point(i);
          CHECK(idx.nearest_sq(p.data()) == 0.0);
        }
      }
      prev = r.points.size();
      prev_pts = r.points;
    }
  }
}

TEST_CASE("coverage ratio and minima coverage") {
  GroundTruth truth;
  Region r;
  r.center = v2(0, 0);
  r.ellipses = {CoverageEllipse{v2(-1, 0), v2(0.5, 0.5), 0.0}, CoverageEllipse{v2(1, 0), v2(0.5, 0.5), 0.0}};
  truth.regions = {r};
  Cluster one;
  one.points = {EvaluatedPoint{v2(-1, 0.1), 0, 0}, EvaluatedPoint{v2(1.2, 0), 0, 1}};
  CHECK(coverage_ratio({one}, truth) == 1.0);
  // split across two clusters does not count
  Cluster a, b;
  a.points = {one.points[0]};
  b.points = {one.points[1]};
  CHECK(coverage_ratio({a, b}, truth) == 0.0);

  GroundTruth minima;
  minima.minima = {v2(0, 0), v2(5, 5)};
  Cluster near;
  near.points = {EvaluatedPoint{v2(0.39, 0), 0, 0}, EvaluatedPoint{v2(5.4, 5), 0, 1}};
  // 0.4 away sits on the boundary and does not count
  CHECK(minima_coverage({near}, minima) == 0.5);
}

TEST_CASE("rotated coverage ellipse") {
  CoverageEllipse e{v2(0, 0), v2(1, 0.25), std::acos(-1.0) / 2};
  CHECK(e.contains(v2(0, 0.9)));
  CHECK_FALSE(e.contains(v2(0.9, 0)));
}

TEST_CASE("marching squares on a disc") {
  const long n = 41;
  const double step = 0.1;
  std::vector<double> vals(n * n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      const double x = -2 + i * step, y = -2 + j * step;
      vals[i * n + j] = x * x + y * y;
    }
  }
  const auto segs = marching_squares(vals, n, n, v2(-2, -2), step, 1.0);
  REQUIRE_FALSE(segs.empty());
  double length = 0.0;
  for (const auto& s : segs) {
    CHECK(s.a.norm() == doctest::Approx(1.0).epsilon(0.02));
    length += (s.b - s.a).norm();
  }
  CHECK(length == doctest::Approx(2 * std::acos(-1.0)).epsilon(0.01));
}

TEST_CASE("block output") {
  PointCloud a(2);
  a.push_back(v2(1, 2));
  PointCloud b(2);
  b.push_back(v2(3, 4));
  std::ostringstream os;
  write_blocks(os, {a, b});
  CHECK(os.str() == "1 2\n\n3 4\n");
}
