#include <doctest.h>

#include <cmath>

#include "regionmap/approx/bspline.hpp"
#include "regionmap/approx/delaunay.hpp"
#include "regionmap/approx/interpolant.hpp"
#include "regionmap/approx/kriging.hpp"
#include "regionmap/approx/surrogate.hpp"

using namespace regionmap;
using namespace regionmap::approx;

namespace {

std::vector<Vector> random_points(Rng& rng, int n, int d, bool lattice) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Vector> pts;
  for (int i = 0; i < n; ++i) {
    Vector x(d);
    for (int k = 0; k < d; ++k) x[k] = u(rng);
    if (lattice) x = (x * 5).array().round() / 5;
    bool dup = false;
    for (const auto& q : pts) dup = dup || q == x;
    if (!dup) pts.push_back(x);
  }
  return pts;
}

double hull_volume(const Delaunay& del) {
  const int d = del.dim();
  double fact = 1.0;
  for (int k = 2; k <= d; ++k) fact *= k;
  double vol = 0.0;
  for (int s : del.simplices()) {
    Matrix a(d, d);
    const auto& v = del.simplex(s);
    for (int k = 1; k <= d; ++k) a.col(k - 1) = del.vertex(v[k]) - del.vertex(v[0]);
    vol += std::abs(a.determinant()) / fact;
  }
  return vol;
}

}  // namespace

TEST_CASE("delaunay empty circumspheres on random and lattice inputs") {
  Rng rng(17);
  for (int d = 2; d <= 4; ++d) {
    for (int t = 0; t < 30; ++t) {
      const auto pts = random_points(rng, d + 2 + t * 2, d, t % 2 == 1);
      if (static_cast<int>(pts.size()) < d + 1) continue;
      try {
        Delaunay del(pts);
        CHECK(del.empty_circumsphere_check());
      } catch (const DegenerateGeometry&) {
        // tiny lattice draws can be flat
      }
    }
  }
}

TEST_CASE("delaunay tiles integer grids exactly") {
  for (int d = 2; d <= 4; ++d) {
    std::vector<Vector> pts;
    const int m = 3;
    int total = 1;
    for (int k = 0; k < d; ++k) total *= m;
    for (int i = 0; i < total; ++i) {
      Vector x(d);
      int r = i;
      for (int k = 0; k < d; ++k) {
        x[k] = r % m;
        r /= m;
      }
      pts.push_back(x);
    }
    Delaunay del(pts);
    CHECK(del.empty_circumsphere_check());
    CHECK(hull_volume(del) == doctest::Approx(std::pow(m - 1, d)).epsilon(1e-12));
  }
}

TEST_CASE("delaunay rejects degenerate input") {
  std::vector<Vector> flat;
  for (int i = 0; i < 5; ++i) flat.push_back(Vector::Constant(2, i));
  CHECK_THROWS_AS(Delaunay{flat}, DegenerateGeometry);
  const std::vector<Vector> two{Vector::Zero(2), Vector::Ones(2)};
  CHECK_THROWS_AS(Delaunay{two}, DegenerateGeometry);
}

TEST_CASE("interpolant reproduces affine data inside and outside the hull") {
  Rng rng(5);
  std::normal_distribution<double> z;
  for (int d = 2; d <= 3; ++d) {
    const auto pts = random_points(rng, 30, d, false);
    Vector g(d);
    for (int k = 0; k < d; ++k) g[k] = z(rng);
    const double c = z(rng);
    std::vector<double> vals;
    for (const auto& p : pts) vals.push_back(c + g.dot(p));
    SimplicialInterpolant interp(pts, vals);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int t = 0; t < 100; ++t) {
      Vector x(d);
      for (int k = 0; k < d; ++k) x[k] = u(rng);
      const auto ve = interp.extended(x);
      CHECK(ve.value == doctest::Approx(c + g.dot(x)).epsilon(1e-9));
      CHECK((ve.gradient - g).norm() < 1e-8);
      if (auto in = interp.interpolate(x)) CHECK(*in == doctest::Approx(c + g.dot(x)).epsilon(1e-9));
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(*interp.interpolate(pts[i]) == doctest::Approx(vals[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("merge duplicates averages values") {
  std::vector<Vector> pts{Vector::Zero(2), Vector::Ones(2), Vector::Zero(2)};
  std::vector<double> vals{1.0, 5.0, 3.0};
  merge_duplicates(pts, vals);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0] == Vector::Zero(2));
  CHECK(vals[0] == 2.0);
  CHECK(vals[1] == 5.0);
}

TEST_CASE("quadratic B-spline basis") {
  for (double u : {0.0, 0.3, 1.0, 2.5, 7.99, 8.0}) {
    const auto b = axis_basis(u, 8);
    CHECK(b.value[0] + b.value[1] + b.value[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.slope[0] + b.slope[1] + b.slope[2] == doctest::Approx(0.0).scale(1.0));
    CHECK(b.first >= 0);
    CHECK(b.first + 2 <= 9);
  }
  Rng rng(3);
  std::normal_distribution<double> z;
  Vector coef(10 * 10);
  for (Eigen::Index i = 0; i < coef.size(); ++i) coef[i] = z(rng);
  BsplineModel m(Box(Vector::Zero(2), Vector::Constant(2, 4.0)), {8, 8}, coef);
  std::uniform_real_distribution<double> u(0, 4);
  for (int t = 0; t < 200; ++t) {
    Vector x(2);
    x << u(rng), u(rng);
    CHECK(std::abs(m.basis_sum(x) - 1.0) < 1e-10);
  }
  // C1 across a knot at x = 0.5
  for (int t = 0; t < 20; ++t) {
    const double y = u(rng);
    Vector a(2), b(2);
    a << 0.5 - 1e-9, y;
    b << 0.5 + 1e-9, y;
    CHECK(std::abs(m.value(a) - m.value(b)) < 1e-7);
    CHECK((m.gradient(a) - m.gradient(b)).norm() < 1e-6);
  }
}

TEST_CASE("spline projections reproduce affine functions") {
  Rng rng(8);
  std::normal_distribution<double> z;
  const auto pts = random_points(rng, 40, 2, false);
  for (auto mode : {Projection::L2, Projection::H1}) {
    Vector g(2);
    g << z(rng), z(rng);
    const double c = z(rng);
    std::vector<double> vals;
    for (const auto& p : pts) vals.push_back(c + g.dot(p));
    SimplicialInterpolant interp(pts, vals);
    const Box box(Vector::Constant(2, -0.1), Vector::Constant(2, 1.1));
    const auto model = bspline_project(interp, box, {8, 8}, mode);
    std::uniform_real_distribution<double> u(-0.1, 1.1);
    for (int t = 0; t < 100; ++t) {
      Vector x(2);
      x << u(rng), u(rng);
      CHECK(std::abs(model.value(x) - (c + g.dot(x))) < 1e-6);
    }
  }
}

TEST_CASE("kriging interpolates and its weights sum to one") {
  Rng rng(9);
  for (int d = 2; d <= 4; d += 2) {
    const auto pts = random_points(rng, 60, d, false);
    std::vector<double> vals;
    for (const auto& p : pts) vals.push_back(std::sin(3 * p[0]) + p.squaredNorm());
    const auto k = KrigingModel::fit(pts, vals);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(k.predict(pts[i]) - vals[i]) < 1e-6);
    std::uniform_real_distribution<double> u(0, 1);
    Vector x(d);
    for (int a = 0; a < d; ++a) x[a] = u(rng);
    const Vector w = k.weights(x);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-9));
    double via_weights = 0.0;
    for (std::size_t i = 0; i < k.values().size(); ++i) via_weights += w[static_cast<Eigen::Index>(i)] * k.values()[i];
    CHECK(via_weights == doctest::Approx(k.predict(x)).epsilon(1e-8));
    const auto again = KrigingModel::from_parts(pts, vals, k.length_scale(), k.nugget());
    CHECK(again.predict(x) == k.predict(x));
  }
  CHECK_THROWS_AS(KrigingModel::fit({Vector::Zero(2)}, {1.0}), Error);
}

TEST_CASE("surrogate fitting, fallback and serialization") {
  CHECK(parse_method("H1") == Method::H1);
  CHECK(parse_method("kriging") == Method::kriging);
  CHECK_THROWS_AS(parse_method("cubic"), ConfigError);

  Rng rng(10);
  std::uniform_real_distribution<double> u(1, 2);
  Cluster c;
  for (int i = 0; i < 30; ++i) {
    Vector x(2);
    x << u(rng), u(rng);
    c.points.push_back(EvaluatedPoint{x, (x.array() - 1.5).square().sum(), static_cast<std::uint64_t>(i)});
  }
  const Box domain(Vector::Zero(2), Vector::Constant(2, 3));
  const Box dom = surrogate_domain(c, GridSpec{}, domain);
  CHECK(domain.contains(dom.lower));
  CHECK(domain.contains(dom.upper));
  for (auto m : {Method::L2, Method::H1, Method::kriging}) {
    const auto fit = fit_surrogate(c, m, GridSpec{}, domain);
    CHECK_FALSE(fit.downgraded);
    const auto back = Surrogate::from_json(fit.surrogate.to_json());
    Vector x(2);
    x << 1.3, 1.7;
    CHECK(back.value(x) == fit.surrogate.value(x));
  }
  // collinear points cannot be triangulated; the spline fit falls back to kriging
  Cluster line;
  for (int i = 0; i < 10; ++i) {
    Vector x(2);
    x << 1 + 0.1 * i, 1 + 0.1 * i;
    line.points.push_back(EvaluatedPoint{x, 0.01 * i, static_cast<std::uint64_t>(i)});
  }
  const auto fb = fit_surrogate(line, Method::H1, GridSpec{}, domain);
  CHECK(fb.downgraded);
  CHECK(fb.surrogate.method() == Method::kriging);
}

TEST_CASE("small complexes and interpolation examples") {
  auto p2 = [](double a, double b) {
    Vector x(2);
    x << a, b;
    return x;
  };
  CHECK(Delaunay({p2(0, 0), p2(1, 0), p2(0, 1)}).simplices().size() == 1);
  const Delaunay square({p2(0, 0), p2(1, 0), p2(0, 1), p2(1, 1)});
  CHECK(square.simplices().size() == 2);
  CHECK(square.empty_circumsphere_check());

  SimplicialInterpolant interp({p2(0, 0), p2(1, 0), p2(0, 1)}, {0.0, 1.0, 0.0});
  CHECK(*interp.interpolate(p2(0.5, 0)) == doctest::Approx(0.5));
  CHECK(*interp.interpolate(p2(1, 0)) == 1.0);
  CHECK_FALSE(interp.interpolate(p2(2, 2)).has_value());
}

TEST_CASE("constants are reproduced by every surrogate") {
  Rng rng(12);
  const auto pts = random_points(rng, 30, 2, false);
  const std::vector<double> vals(pts.size(), 0.7);
  SimplicialInterpolant interp(pts, vals);
  const Box box(Vector::Constant(2, -0.1), Vector::Constant(2, 1.1));
  for (auto mode : {Projection::L2, Projection::H1}) {
    const auto m = bspline_project(interp, box, {8, 8}, mode);
    for (int t = 0; t < 50; ++t) {
      Vector x = Vector::Random(2) * 0.6 + Vector::Constant(2, 0.5);
      CHECK(std::abs(m.value(x) - 0.7) < 1e-8);
    }
  }
  const auto k = KrigingModel::fit(pts, vals);
  CHECK(std::abs(k.predict(Vector::Constant(2, 0.3)) - 0.7) < 1e-6);
}

TEST_CASE("one-dimensional kriging midpoint") {
  const auto k = KrigingModel::fit({Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)}, {0.0, 1.0});
  CHECK(k.predict(Vector::Constant(1, 0.5)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("L2 beats H1 in the L2 norm on steep data") {
  int wins = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const auto pts = random_points(rng, 60, 2, false);
    std::vector<double> vals;
    for (const auto& p : pts) vals.push_back(std::tanh(12 * (p[0] - 0.5)));
    SimplicialInterpolant interp(pts, vals);
    const Box box(Vector::Constant(2, -0.1), Vector::Constant(2, 1.1));
    const auto l2 = bspline_project(interp, box, {8, 8}, Projection::L2);
    const auto h1 = bspline_project(interp, box, {8, 8}, Projection::H1);
    double e2 = 0.0, e1 = 0.0;
    std::uniform_real_distribution<double> u(-0.1, 1.1);
    for (int t = 0; t < 4000; ++t) {
      Vector x(2);
      x << u(rng), u(rng);
      const double f = interp.extended(x).value;
      e2 += (l2.value(x) - f) * (l2.value(x) - f);
      e1 += (h1.value(x) - f) * (h1.value(x) - f);
    }
    wins += e2 <= e1;
  }
  CHECK(wins >= 9);
}

TEST_CASE("spline grid evaluation matches pointwise values") {
  Rng rng(15);
  for (int d = 1; d <= 4; ++d) {
    Box box;
    box.lower = Vector::Constant(d, -1.0);
    box.upper = Vector::Constant(d, 2.0);
    std::vector<int> cells(static_cast<std::size_t>(d), 3);
    std::size_t n = 1;
    for (int c : cells) n *= static_cast<std::size_t>(c + 2);
    std::uniform_real_distribution<double> u(-1, 1);
    Vector coef(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < coef.size(); ++i) coef[i] = u(rng);
    const BsplineModel m(box, cells, coef);
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      for (int j = 0; j < 7; ++j) axes[a].push_back(-1.5 + 0.6 * j + 0.1 * a);
    }
    const auto v = m.grid_values(axes);
    Vector x(d);
    for (std::size_t f = 0; f < v.size(); ++f) {
      std::size_t r = f;
      for (int a = d - 1; a >= 0; --a) {
        x[a] = axes[a][r % axes[a].size()];
        r /= axes[a].size();
      }
      CHECK(v[f] == doctest::Approx(m.value(x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("kriging grid evaluation agrees with the full prediction") {
  Rng rng(14);
  for (int d = 1; d <= 4; ++d) {
    std::uniform_real_distribution<double> u(0, 10);
    std::vector<Vector> pts;
    std::vector<double> vals;
    for (int i = 0; i < 150; ++i) {
      Vector x(d);
      for (int k = 0; k < d; ++k) x[k] = u(rng) * (k == 0 ? 1.0 : 0.3);
      pts.push_back(x);
      vals.push_back(std::cos(x[0]) + 0.1 * x.squaredNorm());
    }
    const auto k = KrigingModel::fit(pts, vals);
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      const int count = d == 1 ? 400 : (d == 4 ? 9 : 23);
      for (int j = 0; j < count; ++j) axes[a].push_back((-2.0 + 14.0 * j / (count - 1)) * (a == 0 ? 1.0 : 0.3));
    }
    // one level straddling the data range and one sitting on a grid value
    Vector probe(d);
    for (int a = 0; a < d; ++a) probe[a] = axes[a][axes[a].size() / 2];
    for (double level : {k.mean() - 0.3, k.predict(probe)}) {
      const auto mask = k.grid_at_or_below(axes, level);
      std::size_t f = 0;
      Vector x(d);
      for (; f < mask.size(); ++f) {
        std::size_t r = f;
        for (int a = d - 1; a >= 0; --a) {
          x[a] = axes[a][r % axes[a].size()];
          r /= axes[a].size();
        }
        CHECK(static_cast<bool>(mask[f]) == (k.predict(x) <= level));
      }
      CHECK(f > 0);
    }
  }
}
