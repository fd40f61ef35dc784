#include <doctest.h>

#include <cmath>

#include "regionmap/problems.hpp"

using namespace regionmap;

namespace {

const double kPi = std::acos(-1.0);

// Straight transcription of the benchmark formulas, kept apart from the library.
double g_ref(double x1, double x2, double c1, double c2, double r1, double r2) {
  const double q = (x1 - c1) * (x1 - c1) / (r1 * r1) + (x2 - c2) * (x2 - c2) / (r2 * r2);
  return 1.0 - std::exp(-std::log(2.0) * q);
}

double c_ref(double x1, double x2) {
  return g_ref(x1, x2, -0.8, 0, 0.5, 1) * g_ref(x1, x2, 0, -0.8, 1, 0.5) *
         g_ref(x1, x2, 0.8, 0, 0.5, 1);
}

double crot_ref(double x1, double x2, double phi) {
  return c_ref(x1 * std::cos(phi) - x2 * std::sin(phi), x1 * std::sin(phi) + x2 * std::cos(phi));
}

double tiles_ref(double x1, double x2, int n) {
  double h = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      h *= crot_ref(x1 - (2 + 4 * i), x2 - (2 + 4 * j), kPi / 2 * ((i + j) % 4));
    }
  }
  return std::max((h - 0.1) / 0.9, 0.0);
}

double f3_ref(const Vector& x) {
  double s = std::cos(kPi * x[0] / 5);
  for (int i = 1; i < 4; ++i) s += std::cos(kPi * x[i]);
  return 2.0 - 0.5 * s;
}

Vector v2(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST_CASE("gaussian valley values") {
  const Vector x0 = v2(0, 0);
  CHECK(gaussian_valley(x0, x0, v2(0.5, 1)) == 0.0);
  CHECK(gaussian_valley(v2(0.5, 0), x0, v2(0.5, 1)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gaussian_valley(v2(1, 0), x0, v2(0.5, 1)) == doctest::Approx(0.9375).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_valley(Vector::Zero(3), x0, v2(1, 1)), InvalidArgument);
}

TEST_CASE("c-shape zeros and identity rotation") {
  CHECK(c_shape(v2(-0.8, 0), 0) == 0.0);
  CHECK(c_shape(v2(0, -0.8), 0) == 0.0);
  Rng rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 100; ++t) {
    const Vector x = v2(u(rng), u(rng));
    CHECK(c_shape(x, 0) == doctest::Approx(c_ref(x[0], x[1])).epsilon(1e-14));
  }
}

TEST_CASE("flatten") {
  CHECK(flatten(0.1, 0.1) == 0.0);
  CHECK(flatten(1.0, 0.1) == doctest::Approx(1.0));
  CHECK(flatten(0.55, 0.1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(flatten(-3.0, 0.1) == 0.0);
  CHECK_THROWS_AS(flatten(0.5, 1.0), InvalidArgument);
}

TEST_CASE("benchmark objectives against the formulas") {
  const auto b1 = benchmark(BenchmarkCase::I);
  const auto b2 = benchmark(BenchmarkCase::II);
  const auto b3 = benchmark(BenchmarkCase::III);
  CHECK(b1.problem.objective()(v2(1.2, 2)) == 0.0);
  Vector z = Vector::Zero(4);
  CHECK(b3.problem.objective()(z) == doctest::Approx(0.0).epsilon(1e-15));
  Vector far(4);
  far << 5, 1, 1, 1;
  CHECK(b3.problem.objective()(far) == doctest::Approx(4.0).epsilon(1e-15));

  Rng rng(11);
  std::uniform_real_distribution<double> u6(0, 6), u20(0, 20), u5(-5, 5), u2(-2, 2);
  for (int t = 0; t < 500; ++t) {
    const Vector a = v2(u6(rng), u6(rng));
    CHECK(std::abs(b1.problem.objective()(a) - tiles_ref(a[0], a[1], 2)) <= 1e-12);
    const Vector b = v2(u20(rng), u20(rng));
    CHECK(std::abs(b2.problem.objective()(b) - tiles_ref(b[0], b[1], 5)) <= 1e-12);
    Vector c(4);
    c << u5(rng), u2(rng), u2(rng), u2(rng);
    CHECK(std::abs(b3.problem.objective()(c) - f3_ref(c)) <= 1e-12);
  }
}

TEST_CASE("codomain bounds and ground truth sizes") {
  const auto b1 = benchmark(BenchmarkCase::I);
  const auto b2 = benchmark(BenchmarkCase::II);
  const auto b3 = benchmark(BenchmarkCase::III);
  CHECK(b1.truth.regions.size() == 4);
  CHECK(b2.truth.regions.size() == 25);
  CHECK(b3.truth.minima.size() == 27);
  for (const auto& r : b2.truth.regions) {
    REQUIRE(r.ellipses.size() == 3);
    for (const auto& e : r.ellipses) CHECK(b2.problem.objective()(e.center) < 0.1);
  }
  Rng rng(5);
  std::uniform_real_distribution<double> u(0, 20);
  for (int t = 0; t < 1000; ++t) {
    const double v = b2.problem.objective()(v2(u(rng), u(rng)));
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  CHECK_THROWS_AS(parse_case("IV"), InvalidArgument);
}

TEST_CASE("tile rotation schedule") {
  const auto b1 = benchmark(BenchmarkCase::I);
  const auto b2 = benchmark(BenchmarkCase::II);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) CHECK(tile_rotation(i, j) == doctest::Approx(kPi / 2 * ((i + j) % 4)));
  }
  CHECK(b1.problem.objective()(v2(2 - 0.8, 2)) == 0.0);
  CHECK(b2.problem.objective()(v2(18 - 0.8, 2)) == 0.0);
}

TEST_CASE("evaluation counting and budget") {
  const auto b = benchmark(BenchmarkCase::I);
  const auto before = b.problem.evaluations();
  b.problem.evaluate(v2(1, 1));
  CHECK(b.problem.evaluations() == before + 1);
  EvalBudget budget(3);
  Evaluator eval(b.problem, budget);
  int got = 0;
  for (int i = 0; i < 10; ++i) got += eval(v2(1, 1)).has_value();
  CHECK(got == 3);
  CHECK(budget.exhausted());
}

TEST_CASE("exact region component counts") {
  const auto b1 = benchmark(BenchmarkCase::I);
  CHECK(exact_region_points(b1.problem, 0.1, 0.05).size() == 4);
  const auto b2 = benchmark(BenchmarkCase::II);
  CHECK(exact_region_points(b2.problem, 0.1, 0.05).size() == 25);
  const auto all = exact_region_points(b1.problem, 2.0, 0.5);
  REQUIRE(all.size() == 1);
  CHECK(all[0].size() == 13 * 13);
}
