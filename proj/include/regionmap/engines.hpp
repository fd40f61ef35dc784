#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "regionmap/core.hpp"
#include "regionmap/problems.hpp"

namespace regionmap {

/// The CMA-ES sampling measure N(mean, sigma^2 C) with its eigen-decomposition
/// C = B diag(scales^2) B^T cached for sampling and whitening.
class GaussianSampler {
 public:
  GaussianSampler() = default;
  GaussianSampler(Vector mean, double sigma, Matrix covariance);
  static GaussianSampler isotropic(Vector mean, double sigma);

  const Vector& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const Matrix& covariance() const { return cov_; }
  const Matrix& basis() const { return basis_; }
  const Vector& scales() const { return scales_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  Vector sample(Rng& rng) const;
  /// z with x = mean + sigma * B D z.
  Vector whiten(const Vector& x) const;
  /// C^{-1/2} v.
  Vector inv_sqrt_times(const Vector& v) const;

 private:
  void decompose();

  Vector mean_;
  double sigma_ = 1.0;
  Matrix cov_;
  Matrix basis_;
  Vector scales_;
};

/// sqrt((x - m)^T (sigma^2 C)^{-1} (x - m)).
double mahalanobis(const GaussianSampler& sampler, const Vector& x);

/// Strategy constants of the (mu/mu_w, lambda) CMA-ES with default weights.
struct CmaParams {
  int lambda = 0;
  int mu = 0;
  Vector weights;
  double mueff = 0.0;
  double cs = 0.0;
  double ds = 0.0;
  double cc = 0.0;
  double c1 = 0.0;
  double cmu = 0.0;
  double chi_n = 0.0;

  static int default_lambda(int n);
  /// lambda <= 0 selects the default 4 + floor(3 ln n).
  static CmaParams defaults(int n, int lambda = 0);
};

enum class StopReason { none, stagnation, sigma_increase, stop_fitness, budget, max_iterations, degenerate };

std::string_view stop_reason_name(StopReason r);

struct StopSpec {
  double stagnation_tol = 0.01;
  int stagnation_window = 3;
  bool stop_on_sigma_increase = false;
  int sigma_warmup = 5;
  double stop_fitness = -std::numeric_limits<double>::infinity();
  int max_iterations = 10000;
  int bound_resamples = 10;
};

struct CmaTraceEntry {
  int iteration = 0;
  std::vector<EvaluatedPoint> population;
  /// The measure the population was drawn from.
  GaussianSampler sampler;
};

struct CmaState {
  GaussianSampler sampler;
  CmaParams params;
  Vector path_sigma;
  Vector path_c;
  int iteration = 0;
  std::optional<EvaluatedPoint> best;
  std::vector<double> mean_fitness;
  std::vector<CmaTraceEntry> trace;
  StopReason stop = StopReason::none;

  static CmaState start(Vector m0, double sigma0, int lambda = 0);

  bool stopped() const { return stop != StopReason::none; }
  /// Population of the most recent (possibly truncated) iteration.
  const std::vector<EvaluatedPoint>& last_population() const;
  std::size_t evaluations() const;
};

/// One generation: sample lambda points (resample out-of-box draws up to
/// `bound_resamples` times, then clamp), evaluate, update (m, sigma, C) and
/// test every stop condition of `stop`. On a sigma-increase stop the
/// pre-update sampler is kept. Budget exhaustion mid-generation keeps the
/// evaluated part in the trace and stops with reason budget.
void cma_step(CmaState& state, const Evaluator& eval, const StopSpec& stop, Rng& rng);

CmaState cma_run(const Evaluator& eval, Vector m0, double sigma0, const StopSpec& stop,
                 Rng& rng, int lambda = 0);

struct SeaParams {
  int population = 40;
  double crossover = 0.1;
  double mutation = 0.5;
  double mutation_std = 2.0;

  void validate() const;
};

/// u * a + (1 - u) * b.
Vector arithmetic_crossover(const Vector& a, const Vector& b, double u);

/// Uniform random population over the evaluator's bounds (truncated if the
/// budget runs out).
std::vector<EvaluatedPoint> sea_initial(const Evaluator& eval, int size, Rng& rng);

/// One SEA generation: roulette selection on min-max normalised inverted
/// fitness, arithmetic crossover, per-coordinate normal mutation, clamping.
/// The previous best survives in place of the worst offspring when no
/// offspring beats it.
std::vector<EvaluatedPoint> sea_epoch(const std::vector<EvaluatedPoint>& population,
                                      const SeaParams& params, const Evaluator& eval, Rng& rng);

}  // namespace regionmap
