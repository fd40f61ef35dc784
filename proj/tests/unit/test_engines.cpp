#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "regionmap/engines.hpp"

using namespace regionmap;

namespace {

Problem box_problem(int n, double half, Problem::Objective f) {
  return Problem("test", Box(Vector::Constant(n, -half), Vector::Constant(n, half)), std::move(f));
}

double sphere(const Vector& x) { return x.squaredNorm(); }

}  // namespace

TEST_CASE("mahalanobis examples") {
  Vector m = Vector::Zero(2);
  Vector e1 = Vector::Unit(2, 0);
  CHECK(mahalanobis(GaussianSampler::isotropic(m, 1.0), m) == 0.0);
  CHECK(mahalanobis(GaussianSampler::isotropic(m, 1.0), e1) == doctest::Approx(1.0));
  CHECK(mahalanobis(GaussianSampler::isotropic(m, 2.0), e1) == doctest::Approx(0.5));
}

TEST_CASE("mahalanobis matches a dense solve on random SPD matrices") {
  Rng rng(21);
  std::normal_distribution<double> z;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 3;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) for (int j = 0; j < n; ++j) a(i, j) = z(rng);
    const Matrix c = a * a.transpose() + 0.1 * Matrix::Identity(n, n);
    Vector m(n), x(n);
    for (int i = 0; i < n; ++i) {
      m[i] = z(rng);
      x[i] = z(rng);
    }
    const double sigma = 0.7;
    GaussianSampler s(m, sigma, c);
    const Vector d = x - m;
    const double oracle = std::sqrt(d.dot((sigma * sigma * c).fullPivLu().solve(d)));
    CHECK(mahalanobis(s, x) == doctest::Approx(oracle).epsilon(1e-9));
    // m + sigma * L u sits at distance |u|
    const Matrix l = c.llt().matrixL();
    Vector u(n);
    for (int i = 0; i < n; ++i) u[i] = z(rng);
    CHECK(mahalanobis(s, m + sigma * l * u) == doctest::Approx(u.norm()).epsilon(1e-9));
  }
}

TEST_CASE("sampler empirical mean") {
  Matrix c(2, 2);
  c << 2.0, 0.5, 0.5, 1.0;
  Vector m(2);
  m << 1.0, -2.0;
  GaussianSampler s(m, 0.5, c);
  CHECK((s.covariance() - s.covariance().transpose()).norm() < 1e-10);
  Rng rng(4);
  const int n = 100000;
  Vector acc = Vector::Zero(2);
  for (int i = 0; i < n; ++i) acc += s.sample(rng);
  acc /= n;
  for (int k = 0; k < 2; ++k) {
    const double sd = 0.5 * std::sqrt(c(k, k)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(acc[k] - m[k]) < 3 * sd);
  }
}

TEST_CASE("default lambda") {
  CHECK(CmaParams::default_lambda(2) == 6);
  CHECK(CmaParams::default_lambda(4) == 8);
  CHECK(CmaParams::defaults(2).weights.sum() == doctest::Approx(1.0));
}

TEST_CASE("cma sphere convergence") {
  int ok = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    auto p = box_problem(2, 10, sphere);
    EvalBudget budget(2000);
    Evaluator eval(p, budget);
    StopSpec stop;
    stop.stagnation_tol = -1.0;
    stop.stop_fitness = 1e-8;
    Rng rng(seed);
    Vector m0(2);
    m0 << 1, 1;
    const auto st = cma_run(eval, m0, 0.5, stop, rng, 8);
    ok += st.best->value < 1e-8;
    // best-so-far never got worse
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : st.trace) {
      for (const auto& q : e.population) best = std::min(best, q.value);
    }
    CHECK(st.best->value == best);
  }
  CHECK(ok >= 9);
}

TEST_CASE("stop fitness and zero budget") {
  auto p = box_problem(2, 10, sphere);
  {
    EvalBudget budget(0);
    Evaluator eval(p, budget);
    Rng rng(1);
    const auto st = cma_run(eval, Vector::Ones(2), 0.5, StopSpec{}, rng);
    CHECK(st.stop == StopReason::budget);
    CHECK(st.iteration == 0);
  }
  {
    EvalBudget budget;
    Evaluator eval(p, budget);
    StopSpec stop;
    stop.stagnation_tol = -1.0;
    stop.stop_fitness = 1e-6;
    Rng rng(2);
    CHECK(cma_run(eval, Vector::Ones(2), 0.5, stop, rng).stop == StopReason::stop_fitness);
  }
}

TEST_CASE("flat objective triggers the sigma-increase stop") {
  int stopped = 0;
  int grew = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    auto p = box_problem(2, 100, [](const Vector&) { return 0.0; });
    EvalBudget budget;
    Evaluator eval(p, budget);
    StopSpec stop;
    stop.stagnation_tol = -1.0;
    stop.stop_on_sigma_increase = true;
    stop.max_iterations = 50;
    Rng rng(seed);
    const auto st = cma_run(eval, Vector::Zero(2), 0.5, stop, rng);
    stopped += st.stop == StopReason::sigma_increase && st.iteration <= 50;

    StopSpec free_run;
    free_run.stagnation_tol = -1.0;
    free_run.max_iterations = 50;
    EvalBudget b2;
    Evaluator e2(p, b2);
    Rng r2(seed);
    const auto long_run = cma_run(e2, Vector::Zero(2), 0.5, free_run, r2);
    grew += long_run.sampler.sigma() > 0.5;
  }
  CHECK(stopped >= 18);
  CHECK(grew > 10);
}

TEST_CASE("cma is deterministic, stays in bounds and ignores constant shifts") {
  auto run = [](double shift, std::uint64_t seed) {
    auto p = box_problem(2, 1, [shift](const Vector& x) { return (x.array() - 0.9).square().sum() + shift; });
    // short run: near convergence the shift rounds away fitness differences
    EvalBudget budget(120);
    Evaluator eval(p, budget);
    Rng rng(seed);
    StopSpec stop;
    stop.stagnation_tol = -1.0;
    return cma_run(eval, Vector::Zero(2), 0.8, stop, rng);
  };
  const auto a = run(0.0, 7);
  const auto b = run(0.0, 7);
  const auto c = run(5.0, 7);
  REQUIRE(a.trace.size() == b.trace.size());
  REQUIRE(a.trace.size() == c.trace.size());
  const Box box(Vector::Constant(2, -1), Vector::Constant(2, 1));
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    for (std::size_t k = 0; k < a.trace[i].population.size(); ++k) {
      const Vector& x = a.trace[i].population[k].x;
      CHECK(x == b.trace[i].population[k].x);
      CHECK(x == c.trace[i].population[k].x);
      CHECK(box.contains(x));
    }
  }
}

TEST_CASE("arithmetic crossover midpoint") {
  Vector a = Vector::Zero(2), b = Vector::Constant(2, 2.0);
  CHECK(arithmetic_crossover(a, b, 0.5) == Vector::Ones(2));
}

TEST_CASE("sea without variation resamples parents") {
  auto p = box_problem(2, 5, sphere);
  EvalBudget budget;
  Evaluator eval(p, budget);
  Rng rng(3);
  const auto pop = sea_initial(eval, 20, rng);
  SeaParams params;
  params.population = 20;
  params.crossover = 0.0;
  params.mutation = 0.0;
  const auto next = sea_epoch(pop, params, eval, rng);
  REQUIRE(next.size() == pop.size());
  for (const auto& q : next) {
    CHECK(std::any_of(pop.begin(), pop.end(), [&](const EvaluatedPoint& r) { return r.value == q.value; }));
  }
}

TEST_CASE("sea mutation spread on constant fitness") {
  auto p = box_problem(2, 1e6, [](const Vector&) { return 1.0; });
  EvalBudget budget;
  Evaluator eval(p, budget);
  Rng rng(9);
  std::vector<EvaluatedPoint> pop;
  for (int i = 0; i < 10000; ++i) pop.push_back(p.evaluate_point(Vector::Zero(2)));
  SeaParams params;
  params.population = 10000;
  params.crossover = 0.0;
  params.mutation = 1.0;
  params.mutation_std = 2.0;
  const auto next = sea_epoch(pop, params, eval, rng);
  for (int k = 0; k < 2; ++k) {
    double s2 = 0.0;
    for (const auto& q : next) s2 += q.x[k] * q.x[k];
    const double sd = std::sqrt(s2 / next.size());
    CHECK(sd == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("sea parameter validation") {
  SeaParams bad;
  bad.crossover = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
