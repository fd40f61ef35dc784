#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "regionmap/localphase.hpp"

using namespace regionmap;

namespace {

Problem double_well() {
  // two basins at x = -1 and x = +1 separated by a ridge at 0
  return Problem("wells", Box(Vector::Constant(1, -3), Vector::Constant(1, 3)),
                 [](const Vector& x) { return (x[0] * x[0] - 1) * (x[0] * x[0] - 1); });
}

EvaluatedPoint at(const Problem& p, double x, std::uint64_t idx) {
  Vector v = Vector::Constant(1, x);
  return EvaluatedPoint{v, p.objective()(v), idx};
}

Cluster single(const EvaluatedPoint& p, int id) {
  Cluster c;
  c.id = id;
  c.points = {p};
  c.provenance = {id};
  return c;
}

}  // namespace

TEST_CASE("hill-valley test") {
  const auto p = double_well();
  EvalBudget budget;
  Evaluator eval(p, budget);
  CHECK(hill_valley_same_basin(at(p, 0.9, 0), at(p, 1.1, 1), eval, 3));
  CHECK_FALSE(hill_valley_same_basin(at(p, -1, 0), at(p, 1, 1), eval, 3));
  CHECK(budget.used() > 0);
  const auto used = budget.used();
  CHECK(hill_valley_same_basin(at(p, 1, 0), at(p, 1, 0), eval, 3));
  CHECK(budget.used() == used);
  CHECK_THROWS_AS(hill_valley_same_basin(at(p, 1, 0), at(p, 2, 1), eval, 0), InvalidArgument);
}

TEST_CASE("merging is transitive and order-free") {
  const auto p = double_well();
  std::vector<Cluster> cl{single(at(p, -1.05, 0), 0), single(at(p, 0.95, 1), 1),
                          single(at(p, -0.95, 2), 2), single(at(p, 1.05, 3), 3),
                          single(at(p, 1.0, 4), 4)};
  EvalBudget b1;
  Evaluator e1(p, b1);
  const auto m1 = merge_clusters(cl, e1, 3);
  std::reverse(cl.begin(), cl.end());
  EvalBudget b2;
  Evaluator e2(p, b2);
  const auto m2 = merge_clusters(cl, e2, 3);
  REQUIRE(m1.size() == 2);
  REQUIRE(m2.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(m1[i].provenance == m2[i].provenance);
    CHECK(m1[i].stage == ClusterStage::reduced);
  }
}

TEST_CASE("resize") {
  Rng rng(1);
  const auto p = double_well();
  Cluster big;
  for (int i = 0; i < 150; ++i) big.points.push_back(at(p, i * 0.01, static_cast<std::uint64_t>(i)));
  const auto r = resize_cluster(big, 10, 100, rng);
  CHECK(r.points.size() == 100);
  CHECK(r.deficit == 0);
  Cluster small;
  for (int i = 0; i < 4; ++i) small.points.push_back(at(p, i * 0.01, static_cast<std::uint64_t>(i)));
  const auto s = resize_cluster(small, 10, 100, rng);
  CHECK(s.points.size() == 4);
  CHECK(s.deficit == 6);
  CHECK_THROWS_AS(resize_cluster(small, 5, 4, rng), InvalidArgument);
}

TEST_CASE("committee selection") {
  const auto p = double_well();
  std::vector<EvaluatedPoint> pool;
  for (int i = 0; i < 20; ++i) pool.push_back(at(p, 1.0 + 0.001 * i, static_cast<std::uint64_t>(i)));
  pool.push_back(at(p, 2.0, 20));
  // pure spread picks the far point second
  const auto sel = committee_select(pool, 2, 0.0);
  REQUIRE(sel.size() == 2);
  CHECK(sel[0] == 0);
  CHECK(sel[1] == 20);
  // pure merit follows the ranking
  const auto merit = committee_select(pool, 3, 1.0);
  CHECK(merit == std::vector<std::size_t>{0, 1, 2});
  CHECK(committee_select(pool, 100, 0.5).size() == pool.size());
}

TEST_CASE("mwea keeps every point and fills deficits") {
  const auto p = double_well();
  EvalBudget budget;
  Evaluator eval(p, budget);
  Cluster c;
  for (int i = 0; i < 4; ++i) c.points.push_back(at(p, 1.0 + 0.01 * i, static_cast<std::uint64_t>(i)));
  c.deficit = 6;
  Rng rng(2);
  MweaParams params;
  const auto out = mwea_run(c, eval, params, rng);
  CHECK(out.stage == ClusterStage::local);
  // 3 epochs: 4 + 6 mutants in the first, then 10 + 10
  CHECK(out.points.size() == 4 + 10 + 10 + 10);
  CHECK(budget.used() == 30);
  for (const auto& q : out.points) CHECK(p.bounds().contains(q.x));
}
