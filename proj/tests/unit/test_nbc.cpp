#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "regionmap/nea2.hpp"

using namespace regionmap;

namespace {

std::vector<EvaluatedPoint> line(const std::vector<double>& xs, const std::vector<double>& fs) {
  std::vector<EvaluatedPoint> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EvaluatedPoint p;
    p.x = Vector::Constant(1, xs[i]);
    p.value = fs[i];
    p.index = i;
    out.push_back(p);
  }
  return out;
}

// Brute-force reference: O(n^2) nearest-better search, both cuts, union-find.
std::vector<int> reference_components(const std::vector<EvaluatedPoint>& pts, double phi, double b) {
  const int n = static_cast<int>(pts.size());
  auto is_better = [&](int j, int i) {
    return pts[j].value < pts[i].value || (pts[j].value == pts[i].value && pts[j].index < pts[i].index);
  };
  std::vector<int> parent(n, -1);
  std::vector<double> len(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i || !is_better(j, i)) continue;
      const double d = (pts[i].x - pts[j].x).norm();
      if (d < best) {
        best = d;
        parent[i] = j;
      }
    }
    if (parent[i] >= 0) len[i] = best;
  }
  std::vector<char> keep(n, 0);
  double total = 0.0;
  int edges = 0;
  for (int i = 0; i < n; ++i) {
    if (parent[i] >= 0) {
      total += len[i];
      ++edges;
    }
  }
  const double mean = edges ? total / edges : 0.0;
  for (int i = 0; i < n; ++i) keep[i] = parent[i] >= 0 && len[i] <= phi * mean;
  std::vector<char> keep2 = keep;
  for (int i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    std::vector<double> incoming;
    for (int j = 0; j < n; ++j) {
      if (keep[j] && parent[j] == i) incoming.push_back(len[j]);
    }
    if (incoming.size() < 3) continue;
    std::sort(incoming.begin(), incoming.end());
    const std::size_t m = incoming.size();
    const double median = m % 2 ? incoming[m / 2] : 0.5 * (incoming[m / 2 - 1] + incoming[m / 2]);
    if (len[i] > b * median) keep2[i] = 0;
  }
  std::vector<int> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    if (keep2[i]) uf[find(i)] = find(parent[i]);
  }
  std::vector<int> comp(n);
  for (int i = 0; i < n; ++i) comp[i] = find(i);
  return comp;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("nbc hand example") {
  NbcParams p;
  p.phi = 2.0;
  p.b = std::numeric_limits<double>::infinity();
  const auto pts = line({0, 1, 2, 10, 11}, {5, 4, 3, 1, 0});
  const auto g = nbc_graph(pts, p);
  CHECK(g.parent == std::vector<int>{1, 2, 3, 4, -1});
  CHECK(g.length[2] == doctest::Approx(8.0));
  CHECK(g.kept[2] == 0);
  const auto clusters = nbc(pts, p);
  REQUIRE(clusters.size() == 2);
  std::vector<std::size_t> sizes{clusters[0].points.size(), clusters[1].points.size()};
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{2, 3});
}

TEST_CASE("nbc single point and empty input") {
  const auto one = line({3}, {1});
  CHECK(nbc(one, NbcParams{}).size() == 1);
  CHECK(nbc_graph(one, NbcParams{}).parent[0] == -1);
  CHECK_THROWS_AS(nbc({}, NbcParams{}), InvalidArgument);
}

TEST_CASE("nbc rule 2 cuts a hub's long outgoing edge") {
  // hub at 0 with three close followers, its better neighbour far away
  std::vector<EvaluatedPoint> pts;
  const double xy[5][2] = {{0, 0}, {0.1, 0}, {-0.1, 0}, {0, 0.1}, {1, 0}};
  const double f[5] = {1, 2, 3, 4, 0};
  for (int i = 0; i < 5; ++i) {
    EvaluatedPoint q;
    q.x = Vector(2);
    q.x << xy[i][0], xy[i][1];
    q.value = f[i];
    q.index = static_cast<std::uint64_t>(i);
    pts.push_back(q);
  }
  NbcParams p;
  p.phi = 1e9;
  p.b = 2.0;
  const auto g = nbc_graph(pts, p);
  CHECK(g.parent[0] == 4);
  CHECK(g.kept[0] == 0);
  CHECK(g.components == 2);
}

TEST_CASE("nbc matches the brute-force oracle") {
  Rng rng(123);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(u(rng) * 50);
    const int d = 1 + t % 4;
    std::vector<EvaluatedPoint> pts;
    for (int i = 0; i < n; ++i) {
      EvaluatedPoint p;
      p.x.resize(d);
      for (int k = 0; k < d; ++k) p.x[k] = u(rng);
      // coarse values create fitness ties
      p.value = t % 3 == 0 ? std::round(u(rng) * 4) : u(rng);
      p.index = static_cast<std::uint64_t>(i);
      pts.push_back(p);
    }
    NbcParams params;
    params.phi = 1.0 + u(rng) * 2.0;
    params.b = 1.0 + u(rng) * 3.0;
    const auto g = nbc_graph(pts, params);
    CHECK(same_partition(g.component, reference_components(pts, params.phi, params.b)));
    std::size_t total = 0;
    for (const auto& c : nbc(pts, params)) total += c.points.size();
    CHECK(total == pts.size());
  }
}
