#include "regionmap/engines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace regionmap {

GaussianSampler::GaussianSampler(Vector mean, double sigma, Matrix covariance)
    : mean_(std::move(mean)), sigma_(sigma), cov_(std::move(covariance)) {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw EngineDegenerate("sigma must be positive");
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw InvalidArgument("covariance shape does not match mean");
  }
  decompose();
}

GaussianSampler GaussianSampler::isotropic(Vector mean, double sigma) {
  const auto n = mean.size();
  return GaussianSampler(std::move(mean), sigma, Matrix::Identity(n, n));
}

void GaussianSampler::decompose() {
  if (!cov_.allFinite()) throw EngineDegenerate("covariance has non-finite entries");
  cov_ = 0.5 * (cov_ + cov_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_);
  if (eig.info() != Eigen::Success) throw EngineDegenerate("covariance eigen-decomposition failed");
  const Vector ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 0.0) || ev.maxCoeff() / ev.minCoeff() > 1e14) {
    throw EngineDegenerate("covariance lost positive definiteness");
  }
  basis_ = eig.eigenvectors();
  scales_ = ev.cwiseSqrt();
}

Vector GaussianSampler::sample(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return mean_ + sigma_ * (basis_ * scales_.cwiseProduct(z));
}

Vector GaussianSampler::whiten(const Vector& x) const {
  return ((basis_.transpose() * (x - mean_)).cwiseQuotient(scales_)) / sigma_;
}

Vector GaussianSampler::inv_sqrt_times(const Vector& v) const {
  return basis_ * (basis_.transpose() * v).cwiseQuotient(scales_);
}

double mahalanobis(const GaussianSampler& sampler, const Vector& x) {
  if (x.size() != sampler.mean().size()) throw InvalidArgument("mahalanobis: dimension mismatch");
  return sampler.whiten(x).norm();
}

int CmaParams::default_lambda(int n) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

CmaParams CmaParams::defaults(int n, int lambda) {
  CmaParams p;
  const double N = n;
  p.lambda = lambda > 0 ? lambda : default_lambda(n);
  if (p.lambda < 4) throw InvalidArgument("CMA-ES needs lambda >= 4");
  p.mu = p.lambda / 2;
  p.weights.resize(p.mu);
  for (int i = 0; i < p.mu; ++i) p.weights[i] = std::log(p.mu + 0.5) - std::log(i + 1.0);
  p.weights /= p.weights.sum();
  p.mueff = 1.0 / p.weights.squaredNorm();
  p.cc = (4.0 + p.mueff / N) / (N + 4.0 + 2.0 * p.mueff / N);
  p.cs = (p.mueff + 2.0) / (N + p.mueff + 5.0);
  p.c1 = 2.0 / ((N + 1.3) * (N + 1.3) + p.mueff);
  p.cmu = std::min(1.0 - p.c1,
                   2.0 * (p.mueff - 2.0 + 1.0 / p.mueff) / ((N + 2.0) * (N + 2.0) + p.mueff));
  p.ds = 1.0 + 2.0 * std::max(0.0, std::sqrt((p.mueff - 1.0) / (N + 1.0)) - 1.0) + p.cs;
  p.chi_n = std::sqrt(N) * (1.0 - 1.0 / (4.0 * N) + 1.0 / (21.0 * N * N));
  return p;
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::none: return "none";
    case StopReason::stagnation: return "stagnation";
    case StopReason::sigma_increase: return "sigma-increase";
    case StopReason::stop_fitness: return "stop-fitness";
    case StopReason::budget: return "budget";
    case StopReason::max_iterations: return "max-iterations";
    case StopReason::degenerate: return "degenerate";
  }
  return "?";
}

CmaState CmaState::start(Vector m0, double sigma0, int lambda) {
  if (!(sigma0 > 0.0)) throw InvalidArgument("sigma0 must be positive");
  CmaState s;
  const auto n = static_cast<int>(m0.size());
  s.params = CmaParams::defaults(n, lambda);
  s.sampler = GaussianSampler::isotropic(std::move(m0), sigma0);
  s.path_sigma = Vector::Zero(n);
  s.path_c = Vector::Zero(n);
  return s;
}

const std::vector<EvaluatedPoint>& CmaState::last_population() const {
  static const std::vector<EvaluatedPoint> empty;
  return trace.empty() ? empty : trace.back().population;
}

std::size_t CmaState::evaluations() const {
  std::size_t n = 0;
  for (const auto& t : trace) n += t.population.size();
  return n;
}

namespace {

Vector draw_in_bounds(const GaussianSampler& sampler, const Box& bounds, int resamples, Rng& rng) {
  Vector x = sampler.sample(rng);
  for (int r = 0; r < resamples && !bounds.contains(x); ++r) x = sampler.sample(rng);
  return bounds.clamp(x);
}

bool stagnated(const std::vector<double>& history, const StopSpec& stop) {
  const auto w = static_cast<std::size_t>(stop.stagnation_window);
  if (w == 0 || history.size() < w) return false;
  const auto [lo, hi] = std::minmax_element(history.end() - static_cast<long>(w), history.end());
  return *hi - *lo <= stop.stagnation_tol;
}

}  // namespace

void cma_step(CmaState& state, const Evaluator& eval, const StopSpec& stop, Rng& rng) {
  if (state.stopped()) return;
  if (eval.budget().exhausted()) {
    state.stop = StopReason::budget;
    return;
  }
  const CmaParams& p = state.params;
  const GaussianSampler& s = state.sampler;
  const int n = s.dim();

  CmaTraceEntry entry;
  entry.iteration = state.iteration;
  entry.sampler = s;
  entry.population.reserve(static_cast<std::size_t>(p.lambda));
  for (int k = 0; k < p.lambda; ++k) {
    Vector x = draw_in_bounds(s, eval.bounds(), stop.bound_resamples, rng);
    auto ep = eval(x);
    if (!ep) break;
    entry.population.push_back(std::move(*ep));
  }
  for (const auto& ep : entry.population) {
    if (!state.best || better(ep, *state.best)) state.best = ep;
  }
  if (static_cast<int>(entry.population.size()) < p.lambda) {
    state.trace.push_back(std::move(entry));
    state.stop = StopReason::budget;
    return;
  }

  std::vector<EvaluatedPoint> sorted = entry.population;
  std::sort(sorted.begin(), sorted.end(), better);
  const double mean_fit =
      std::accumulate(sorted.begin(), sorted.end(), 0.0,
                      [](double acc, const EvaluatedPoint& e) { return acc + e.value; }) /
      p.lambda;
  state.trace.push_back(std::move(entry));
  state.mean_fitness.push_back(mean_fit);

  const Vector old_mean = s.mean();
  const double sigma = s.sigma();
  Vector new_mean = Vector::Zero(n);
  for (int i = 0; i < p.mu; ++i) new_mean += p.weights[i] * sorted[i].x;
  const Vector y_w = (new_mean - old_mean) / sigma;

  Vector ps = (1.0 - p.cs) * state.path_sigma +
              std::sqrt(p.cs * (2.0 - p.cs) * p.mueff) * s.inv_sqrt_times(y_w);
  const double gen = state.iteration + 1;
  const double ps_norm = ps.norm();
  const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - p.cs, 2.0 * gen)) <
                    (1.4 + 2.0 / (n + 1.0)) * p.chi_n;
  Vector pc = (1.0 - p.cc) * state.path_c;
  if (hsig) pc += std::sqrt(p.cc * (2.0 - p.cc) * p.mueff) * y_w;

  Matrix rank_mu = Matrix::Zero(n, n);
  for (int i = 0; i < p.mu; ++i) {
    const Vector y = (sorted[i].x - old_mean) / sigma;
    rank_mu += p.weights[i] * y * y.transpose();
  }
  const double hsig_corr = hsig ? 0.0 : p.cc * (2.0 - p.cc);
  Matrix cov = (1.0 - p.c1 - p.cmu) * s.covariance() +
               p.c1 * (pc * pc.transpose() + hsig_corr * s.covariance()) + p.cmu * rank_mu;

  double new_sigma = sigma * std::exp((p.cs / p.ds) * (ps_norm / p.chi_n - 1.0));
  // flat-fitness escape of the reference implementation
  const auto flat_idx = static_cast<std::size_t>(std::ceil(0.7 * p.lambda)) - 1;
  if (sorted.front().value == sorted[flat_idx].value) {
    new_sigma *= std::exp(0.2 + p.cs / p.ds);
  }

  state.iteration += 1;

  GaussianSampler next;
  try {
    next = GaussianSampler(new_mean, new_sigma, cov);
  } catch (const EngineDegenerate&) {
    state.stop = StopReason::degenerate;
    return;
  }

  if (stagnated(state.mean_fitness, stop)) {
    state.stop = StopReason::stagnation;
  } else if (stop.stop_on_sigma_increase && state.iteration > stop.sigma_warmup &&
             new_sigma > sigma) {
    // keep the measure as it was before the increase
    state.stop = StopReason::sigma_increase;
    return;
  } else if (state.best->value <= stop.stop_fitness) {
    state.stop = StopReason::stop_fitness;
  } else if (state.iteration >= stop.max_iterations) {
    state.stop = StopReason::max_iterations;
  } else if (eval.budget().exhausted()) {
    state.stop = StopReason::budget;
  }
  state.sampler = std::move(next);
  state.path_sigma = std::move(ps);
  state.path_c = std::move(pc);
}

CmaState cma_run(const Evaluator& eval, Vector m0, double sigma0, const StopSpec& stop, Rng& rng,
                 int lambda) {
  if (!eval.bounds().contains(m0, 1e-12)) throw InvalidArgument("cma_run: m0 outside bounds");
  CmaState state = CmaState::start(std::move(m0), sigma0, lambda);
  while (!state.stopped()) cma_step(state, eval, stop, rng);
  return state;
}

void SeaParams::validate() const {
  if (population < 1) throw ConfigError("SEA population must be >= 1");
  if (crossover < 0.0 || crossover > 1.0) throw ConfigError("SEA crossover probability outside [0,1]");
  if (mutation < 0.0 || mutation > 1.0) throw ConfigError("SEA mutation probability outside [0,1]");
  if (!(mutation_std > 0.0)) throw ConfigError("SEA mutation std must be positive");
}

Vector arithmetic_crossover(const Vector& a, const Vector& b, double u) { return u * a + (1.0 - u) * b; }

std::vector<EvaluatedPoint> sea_initial(const Evaluator& eval, int size, Rng& rng) {
  const Box& box = eval.bounds();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<EvaluatedPoint> pop;
  pop.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    Vector x(box.dim());
    for (int a = 0; a < box.dim(); ++a) x[a] = box.lower[a] + unit(rng) * (box.upper[a] - box.lower[a]);
    auto ep = eval(box.clamp(x));
    if (!ep) break;
    pop.push_back(std::move(*ep));
  }
  return pop;
}

std::vector<EvaluatedPoint> sea_epoch(const std::vector<EvaluatedPoint>& population,
                                      const SeaParams& params, const Evaluator& eval, Rng& rng) {
  if (population.empty()) throw InvalidArgument("sea_epoch: empty population");
  const Box& box = eval.bounds();
  const std::size_t size = population.size();

  double fmin = population.front().value;
  double fmax = fmin;
  for (const auto& e : population) {
    fmin = std::min(fmin, e.value);
    fmax = std::max(fmax, e.value);
  }
  std::vector<double> weights(size, 1.0);
  if (fmax > fmin) {
    for (std::size_t i = 0; i < size; ++i) weights[i] = (fmax - population[i].value) / (fmax - fmin);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, params.mutation_std);

  std::vector<EvaluatedPoint> offspring;
  offspring.reserve(size);
  for (std::size_t k = 0; k < size; ++k) {
    Vector child = population[pick(rng)].x;
    if (unit(rng) < params.crossover) {
      const Vector& other = population[pick(rng)].x;
      child = arithmetic_crossover(child, other, unit(rng));
    }
    for (Eigen::Index a = 0; a < child.size(); ++a) {
      if (unit(rng) < params.mutation) child[a] += normal(rng);
    }
    auto ep = eval(box.clamp(child));
    if (!ep) break;
    offspring.push_back(std::move(*ep));
  }

  const auto elite = *std::min_element(population.begin(), population.end(), better);
  if (offspring.size() < size) {
    // budget ran out: keep the best of parents and partial offspring
    std::vector<EvaluatedPoint> pool = population;
    pool.insert(pool.end(), offspring.begin(), offspring.end());
    std::sort(pool.begin(), pool.end(), better);
    pool.resize(size);
    return pool;
  }
  const auto best_child = std::min_element(offspring.begin(), offspring.end(), better);
  if (elite.value < best_child->value) {
    auto worst = std::max_element(offspring.begin(), offspring.end(), better);
    *worst = elite;
  }
  return offspring;
}

}  // namespace regionmap
