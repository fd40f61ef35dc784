#include "regionmap/hms.hpp"

#include <algorithm>
#include <limits>

namespace regionmap {

const char* stage_name(ClusterStage s) {
  switch (s) {
    case ClusterStage::raw: return "raw";
    case ClusterStage::reduced: return "reduced";
    case ClusterStage::local: return "local";
  }
  return "?";
}

const EvaluatedPoint& Cluster::best() const {
  if (points.empty()) throw InvalidArgument("best() of an empty cluster");
  return *std::min_element(points.begin(), points.end(), better);
}

Vector Cluster::centroid() const {
  if (points.empty()) throw InvalidArgument("centroid() of an empty cluster");
  Vector c = Vector::Zero(points.front().x.size());
  for (const auto& p : points) c += p.x;
  return c / static_cast<double>(points.size());
}

void HmsConfig::validate() const {
  if (metaepoch_length < 1) throw ConfigError("metaepoch_length must be >= 1");
  root.validate();
  if (!(sprout_min_distance >= 0.0)) throw ConfigError("sprout_min_distance must be >= 0");
  if (!(leaf_sigma0 > 0.0)) throw ConfigError("leaf sigma0 must be positive");
  if (leaf_lambda != 0 && leaf_lambda < 4) throw ConfigError("leaf lambda must be 0 (auto) or >= 4");
  if (!(stagnation_tol >= 0.0) || stagnation_window < 1) throw ConfigError("invalid leaf stagnation settings");
  if (sigma_warmup < 0) throw ConfigError("sigma warm-up must be >= 0");
  if (budget == 0) throw ConfigError("global budget must be > 0");
}

StopSpec HmsConfig::leaf_stop() const {
  StopSpec s;
  s.stagnation_tol = stagnation_tol;
  s.stagnation_window = stagnation_window;
  s.stop_on_sigma_increase = true;
  s.sigma_warmup = sigma_warmup;
  return s;
}

namespace {

void run_sea(DemeNode& node, const HmsConfig& config, const Evaluator& eval, Rng& rng) {
  auto& sea = std::get<SeaState>(node.engine);
  for (int e = 0; e < config.metaepoch_length && !eval.budget().exhausted(); ++e) {
    const std::uint64_t before = eval.budget().used();
    sea.population = sea_epoch(sea.population, sea.params, eval, rng);
    node.evaluations += eval.budget().used() - before;
    ++sea.epochs;
  }
}

void run_cma(DemeNode& node, const HmsConfig& config, const Evaluator& eval, Rng& rng) {
  auto& cma = std::get<CmaState>(node.engine);
  const StopSpec stop = config.leaf_stop();
  for (int e = 0; e < config.metaepoch_length && !cma.stopped(); ++e) {
    const std::uint64_t before = eval.budget().used();
    cma_step(cma, eval, stop, rng);
    node.evaluations += eval.budget().used() - before;
  }
  if (cma.stopped()) {
    node.status = DemeStatus::stopped;
    node.stop_reason = cma.stop;
  }
}

DemeSnapshot snapshot(const DemeNode& node) {
  DemeSnapshot s;
  s.id = node.id;
  s.level = node.level;
  s.active = node.active();
  s.stop_reason = std::string(stop_reason_name(node.stop_reason));
  s.evaluations = node.evaluations;
  if (node.is_leaf()) {
    const CmaState& c = node.cma();
    s.mean = c.sampler.mean();
    s.sigma = c.sampler.sigma();
    s.best = c.best ? c.best->value : std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto& pop = node.sea().population;
    if (!pop.empty()) {
      const auto& b = *std::min_element(pop.begin(), pop.end(), better);
      s.mean = b.x;
      s.best = b.value;
    }
  }
  return s;
}

}  // namespace

bool metaepoch(DemeNode& tree, const HmsConfig& config, const Evaluator& eval, Rng& rng) {
  for (auto& leaf : tree.children) {
    if (eval.budget().exhausted()) return false;
    if (leaf.active()) run_cma(leaf, config, eval, rng);
  }
  if (eval.budget().exhausted()) return false;
  if (tree.active()) run_sea(tree, config, eval, rng);
  return !eval.budget().exhausted();
}

std::optional<int> try_sprout(DemeNode& tree, const HmsConfig& config) {
  const auto& pop = tree.sea().population;
  if (pop.empty()) return std::nullopt;
  double best_value = pop.front().value;
  for (const auto& e : pop) best_value = std::min(best_value, e.value);
  if (!(best_value < config.sprout_max_fitness)) return std::nullopt;

  auto clearance = [&](const Vector& x) {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& leaf : tree.children) {
      if (leaf.seed_point) c = std::min(c, euclidean(*leaf.seed_point, x));
      c = std::min(c, euclidean(leaf.cma().sampler.mean(), x));
    }
    return c;
  };
  // On a plateau many individuals share the best value; take the one
  // farthest from the existing leaves, then the newest.
  const EvaluatedPoint* cand = nullptr;
  double cand_clearance = -1.0;
  for (const auto& e : pop) {
    if (e.value != best_value) continue;
    const double c = clearance(e.x);
    if (!cand || c > cand_clearance || (c == cand_clearance && e.index > cand->index)) {
      cand = &e;
      cand_clearance = c;
    }
  }
  if (cand_clearance < config.sprout_min_distance) return std::nullopt;
  DemeNode leaf;
  leaf.id = static_cast<int>(tree.children.size()) + 1;
  leaf.level = 2;
  leaf.engine = CmaState::start(cand->x, config.leaf_sigma0, config.leaf_lambda);
  leaf.seed_point = cand->x;
  tree.children.push_back(std::move(leaf));
  return tree.children.back().id;
}

HmsResult hms_run(const Problem& problem, const HmsConfig& config, EvalBudget& budget, Rng& rng) {
  config.validate();
  const Evaluator eval(problem, budget);
  HmsResult result;
  DemeNode& root = result.tree;
  root.id = 0;
  root.level = 1;
  SeaState sea;
  sea.params = config.root;
  sea.population = sea_initial(eval, config.root.population, rng);
  root.evaluations = sea.population.size();
  root.engine = std::move(sea);

  int me = 0;
  while (!budget.exhausted() && !root.sea().population.empty()) {
    const bool any_active =
        root.active() || std::any_of(root.children.begin(), root.children.end(),
                                     [](const DemeNode& d) { return d.active(); });
    if (!any_active) break;
    const bool go_on = metaepoch(root, config, eval, rng);
    MetaepochRecord rec;
    rec.metaepoch = ++me;
    rec.evaluations = budget.used();
    rec.demes.push_back(snapshot(root));
    for (const auto& leaf : root.children) rec.demes.push_back(snapshot(leaf));
    result.trace.push_back(std::move(rec));
    if (!go_on) break;
    try_sprout(root, config);
  }

  for (const auto& leaf : root.children) {
    for (const auto& t : leaf.cma().trace) {
      result.leaf_points.insert(result.leaf_points.end(), t.population.begin(), t.population.end());
    }
  }
  return result;
}

std::vector<Cluster> extract_clusters(const DemeNode& tree,
                                      const std::vector<EvaluatedPoint>& all_points) {
  std::vector<Cluster> out;
  for (const auto& leaf : tree.children) {
    const GaussianSampler& s = leaf.cma().sampler;
    Cluster c;
    c.id = leaf.id;
    c.stage = ClusterStage::raw;
    c.provenance = {leaf.id};
    for (const auto& q : all_points) {
      if (mahalanobis(s, q.x) <= 1.0) c.points.push_back(q);
    }
    if (!c.points.empty()) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace regionmap
