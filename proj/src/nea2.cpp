#include "regionmap/nea2.hpp"

#include <algorithm>
#include <numeric>

#include "regionmap/point_cloud.hpp"

namespace regionmap {

void NbcParams::validate() const {
  if (!(phi > 0.0) || !(b > 0.0)) throw ConfigError("NBC phi and b must be positive");
  if (sample_size < 0) throw ConfigError("NBC sample size must be >= 0");
}

void Nea2Config::validate() const {
  nbc.validate();
  if (!(sigma0 > 0.0)) throw ConfigError("NEA2 sigma0 must be positive");
  if (lambda != 0 && lambda < 4) throw ConfigError("NEA2 lambda must be 0 (auto) or >= 4");
  if (budget == 0) throw ConfigError("global budget must be > 0");
}

namespace {

int find(std::vector<int>& uf, int i) {
  while (uf[i] != i) {
    uf[i] = uf[uf[i]];
    i = uf[i];
  }
  return i;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

NbcGraph nbc_graph(const std::vector<EvaluatedPoint>& points, const NbcParams& params) {
  if (points.empty()) throw InvalidArgument("nbc: empty input");
  const std::size_t n = points.size();
  const int dim = static_cast<int>(points.front().x.size());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return better(points[a], points[b]); });

  // Points in rank order; the better set of rank r is the prefix [0, r).
  PointCloud ranked(dim);
  ranked.reserve(n);
  for (std::size_t r = 0; r < n; ++r) ranked.push_back(points[order[r]].x);
  const simd::ColumnView view = ranked.view();

  NbcGraph g;
  g.parent.assign(n, -1);
  g.length.assign(n, 0.0);
  g.kept.assign(n, 0);
  std::vector<double> dist(n);
  for (std::size_t r = 1; r < n; ++r) {
    const Vector& q = points[order[r]].x;
    simd::squared_distances(q.data(), view, 0, r, dist.data());
    // distance ties resolve to the lower input position
    std::size_t best_r = 0;
    for (std::size_t k = 1; k < r; ++k) {
      if (dist[k] < dist[best_r] || (dist[k] == dist[best_r] && order[k] < order[best_r])) best_r = k;
    }
    g.parent[order[r]] = static_cast<int>(order[best_r]);
    g.length[order[r]] = std::sqrt(dist[best_r]);
    g.kept[order[r]] = 1;
  }

  // rule 1
  double total = 0.0;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.parent[i] >= 0) {
      total += g.length[i];
      ++edges;
    }
  }
  if (edges > 0) {
    const double cut = params.phi * total / static_cast<double>(edges);
    for (std::size_t i = 0; i < n; ++i) {
      if (g.kept[i] && g.length[i] > cut) g.kept[i] = 0;
    }
  }

  // rule 2, evaluated on the rule-1 graph and applied at once
  std::vector<std::vector<double>> incoming(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.kept[i]) incoming[g.parent[i]].push_back(g.length[i]);
  }
  std::vector<std::size_t> cut2;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.kept[i] && incoming[i].size() >= 3 && g.length[i] > params.b * median(incoming[i])) {
      cut2.push_back(i);
    }
  }
  for (std::size_t i : cut2) g.kept[i] = 0;

  std::vector<int> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.kept[i]) {
      const int a = find(uf, static_cast<int>(i));
      const int b = find(uf, g.parent[i]);
      if (a != b) uf[std::max(a, b)] = std::min(a, b);
    }
  }
  g.component.assign(n, -1);
  std::vector<int> label(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const int root = find(uf, static_cast<int>(i));
    if (label[root] < 0) label[root] = g.components++;
    g.component[i] = label[root];
  }
  return g;
}

std::vector<Cluster> nbc(const std::vector<EvaluatedPoint>& points, const NbcParams& params) {
  const NbcGraph g = nbc_graph(points, params);
  std::vector<Cluster> out(static_cast<std::size_t>(g.components));
  for (int c = 0; c < g.components; ++c) out[c].id = c;
  for (std::size_t i = 0; i < points.size(); ++i) out[g.component[i]].points.push_back(points[i]);
  return out;
}

Nea2Result nea2_run(const Problem& problem, const Nea2Config& config, EvalBudget& budget, Rng& rng) {
  config.validate();
  const Evaluator eval(problem, budget);
  StopSpec stop;
  stop.stagnation_tol = config.stagnation_tol;
  stop.stagnation_window = config.stagnation_window;
  stop.stop_on_sigma_increase = false;

  Nea2Result result;
  const int sample_size = config.nbc.resolved_sample_size(problem.dimension());
  int next_id = 0;
  for (int round = 1; !budget.exhausted(); ++round) {
    Nea2Round rec;
    rec.round = round;
    std::vector<EvaluatedPoint> sample = sea_initial(eval, sample_size, rng);
    rec.sample = sample.size();
    if (static_cast<int>(sample.size()) < sample_size) {
      rec.evaluations = budget.used();
      result.trace.push_back(std::move(rec));
      break;
    }
    std::vector<Cluster> groups = nbc(sample, config.nbc);
    std::sort(groups.begin(), groups.end(),
              [](const Cluster& a, const Cluster& b) { return better(a.best(), b.best()); });
    rec.clusters = static_cast<int>(groups.size());
    for (const auto& g : groups) {
      if (budget.exhausted()) break;
      const CmaState cma = cma_run(eval, g.best().x, config.sigma0, stop, rng, config.lambda);
      rec.cma_evaluations.push_back(static_cast<int>(cma.evaluations()));
      rec.stop_reasons.emplace_back(stop_reason_name(cma.stop));
      // a cut-off run contributes its last full generation if the final one is empty
      const std::vector<EvaluatedPoint>* pop = nullptr;
      for (auto it = cma.trace.rbegin(); it != cma.trace.rend(); ++it) {
        if (!it->population.empty()) {
          pop = &it->population;
          break;
        }
      }
      if (pop == nullptr) continue;
      Cluster c;
      c.id = next_id++;
      c.stage = ClusterStage::raw;
      c.points = *pop;
      c.provenance = {c.id};
      c.converged = cma.stop != StopReason::budget && cma.stop != StopReason::degenerate;
      result.clusters.push_back(std::move(c));
    }
    rec.evaluations = budget.used();
    result.trace.push_back(std::move(rec));
  }
  return result;
}

}  // namespace regionmap
