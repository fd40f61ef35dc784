#include "regionmap/localphase.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace regionmap {

bool hill_valley_same_basin(const EvaluatedPoint& a, const EvaluatedPoint& b, const Evaluator& eval,
                            int k) {
  if (k < 1) throw InvalidArgument("hill-valley test needs k >= 1");
  if (a.x == b.x) return true;
  const double ceiling = std::max(a.value, b.value) + 1e-9;
  for (int j = 1; j <= k; ++j) {
    const double t = static_cast<double>(j) / (k + 1);
    auto ep = eval(a.x + t * (b.x - a.x));
    // without budget the pair cannot be confirmed
    if (!ep) return false;
    if (ep->value > ceiling) return false;
  }
  return true;
}

namespace {

int find(std::vector<int>& uf, int i) {
  while (uf[i] != i) {
    uf[i] = uf[uf[i]];
    i = uf[i];
  }
  return i;
}

}  // namespace

std::vector<Cluster> merge_clusters(const std::vector<Cluster>& clusters, const Evaluator& eval,
                                    int k, MergeStats* stats) {
  const int n = static_cast<int>(clusters.size());
  std::vector<EvaluatedPoint> bests;
  bests.reserve(clusters.size());
  for (const auto& c : clusters) bests.push_back(c.best());

  MergeStats local;
  const std::uint64_t before = eval.budget().used();
  std::vector<int> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (find(uf, i) == find(uf, j)) continue;
      ++local.pairs_tested;
      if (hill_valley_same_basin(bests[i], bests[j], eval, k)) {
        const int a = find(uf, i);
        const int b = find(uf, j);
        uf[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  local.evaluations = eval.budget().used() - before;
  if (stats) *stats = local;

  // Emit groups ordered by their best member so the output is order-free.
  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[find(uf, i)].push_back(i);
  std::vector<Cluster> out;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    Cluster c;
    c.stage = ClusterStage::reduced;
    c.converged = true;
    for (int i : g) {
      const Cluster& src = clusters[i];
      c.points.insert(c.points.end(), src.points.begin(), src.points.end());
      c.provenance.insert(c.provenance.end(), src.provenance.begin(), src.provenance.end());
      c.converged = c.converged && src.converged;
    }
    std::sort(c.points.begin(), c.points.end(), better);
    // pooled HMS points can sit in several source clusters
    c.points.erase(std::unique(c.points.begin(), c.points.end(),
                               [](const EvaluatedPoint& a, const EvaluatedPoint& b) {
                                 return a.index == b.index;
                               }),
                   c.points.end());
    std::sort(c.provenance.begin(), c.provenance.end());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const Cluster& a, const Cluster& b) { return better(a.points.front(), b.points.front()); });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

Cluster resize_cluster(const Cluster& cluster, int min_size, int max_size, Rng& rng) {
  if (min_size > max_size) throw InvalidArgument("resize_cluster: min > max");
  Cluster out = cluster;
  const auto size = static_cast<int>(cluster.points.size());
  out.deficit = 0;
  if (size == 0) return out;
  if (size > max_size) {
    std::vector<std::size_t> idx(cluster.points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(max_size));
    std::sort(idx.begin(), idx.end());
    out.points.clear();
    for (std::size_t i : idx) out.points.push_back(cluster.points[i]);
  } else if (size < min_size) {
    out.deficit = min_size - size;
  }
  return out;
}

void MweaParams::validate() const {
  if (epochs < 0) throw ConfigError("MWEA epochs must be >= 0");
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("MWEA alpha must lie in [0,1]");
  if (!(fallback_std > 0.0)) throw ConfigError("MWEA fallback std must be positive");
}

double diameter(const std::vector<EvaluatedPoint>& points) {
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      d = std::max(d, (points[i].x - points[j].x).squaredNorm());
    }
  }
  return std::sqrt(d);
}

std::vector<std::size_t> committee_select(const std::vector<EvaluatedPoint>& pool, std::size_t k,
                                          double alpha) {
  const std::size_t n = pool.size();
  k = std::min(k, n);
  std::vector<std::size_t> selected;
  if (k == 0) return selected;

  std::vector<std::size_t> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::sort(by_rank.begin(), by_rank.end(),
            [&](std::size_t a, std::size_t b) { return better(pool[a], pool[b]); });
  std::vector<double> merit(n);
  for (std::size_t r = 0; r < n; ++r) {
    merit[by_rank[r]] = n > 1 ? 1.0 - static_cast<double>(r) / static_cast<double>(n - 1) : 1.0;
  }

  std::vector<char> taken(n, 0);
  std::vector<double> gap(n, std::numeric_limits<double>::infinity());
  double span = 0.0;
  auto take = [&](std::size_t i) {
    taken[i] = 1;
    for (std::size_t s : selected) span = std::max(span, euclidean(pool[s].x, pool[i].x));
    selected.push_back(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (!taken[j]) gap[j] = std::min(gap[j], euclidean(pool[j].x, pool[i].x));
    }
  };
  take(by_rank.front());

  while (selected.size() < k) {
    double norm = span;
    if (!(norm > 0.0)) {
      norm = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!taken[j]) norm = std::max(norm, gap[j]);
      }
    }
    std::size_t pick = n;
    double pick_score = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t j = by_rank[r];
      if (taken[j]) continue;
      const double spread = norm > 0.0 ? gap[j] / norm : 0.0;
      const double score = alpha * merit[j] + (1.0 - alpha) * spread;
      if (score > pick_score) {
        pick_score = score;
        pick = j;
      }
    }
    take(pick);
  }
  return selected;
}

Cluster mwea_run(const Cluster& cluster, const Evaluator& eval, const MweaParams& params, Rng& rng) {
  if (cluster.points.empty()) throw InvalidArgument("mwea_run: empty cluster");
  params.validate();
  const Box& box = eval.bounds();

  Cluster out = cluster;
  out.stage = ClusterStage::local;
  out.deficit = 0;

  const double span = diameter(cluster.points);
  const double std_dev = span > 0.0 ? 0.5 * span : params.fallback_std;
  std::normal_distribution<double> normal(0.0, std_dev);
  auto mutate = [&](const Vector& x) {
    Vector y = x;
    for (Eigen::Index a = 0; a < y.size(); ++a) y[a] += normal(rng);
    return box.clamp(y);
  };

  std::vector<EvaluatedPoint> population = cluster.points;
  const std::size_t target = population.size() + static_cast<std::size_t>(std::max(cluster.deficit, 0));
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::vector<EvaluatedPoint> mutants;
    bool exhausted = false;
    for (const auto& p : population) {
      auto ep = eval(mutate(p.x));
      if (!ep) {
        exhausted = true;
        break;
      }
      mutants.push_back(std::move(*ep));
    }
    if (epoch == 0 && !exhausted) {
      std::uniform_int_distribution<std::size_t> member(0, population.size() - 1);
      for (int d = 0; d < cluster.deficit; ++d) {
        auto ep = eval(mutate(population[member(rng)].x));
        if (!ep) {
          exhausted = true;
          break;
        }
        mutants.push_back(std::move(*ep));
      }
    }
    out.points.insert(out.points.end(), mutants.begin(), mutants.end());
    if (exhausted) break;

    std::vector<EvaluatedPoint> pool = population;
    pool.insert(pool.end(), mutants.begin(), mutants.end());
    std::vector<EvaluatedPoint> next;
    for (std::size_t i : committee_select(pool, target, params.alpha)) next.push_back(pool[i]);
    population = std::move(next);
  }
  return out;
}

}  // namespace regionmap
