#include "regionmap/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <unistd.h>

#include "regionmap/approx/bspline.hpp"
#include "regionmap/approx/delaunay.hpp"
#include "regionmap/approx/interpolant.hpp"
#include "regionmap/approx/kriging.hpp"
#include "regionmap/approx/surrogate.hpp"
#include "regionmap/engines.hpp"
#include "regionmap/harness.hpp"
#include "regionmap/nea2.hpp"
#include "regionmap/regions.hpp"

namespace regionmap::acceptance {

namespace {

namespace fs = std::filesystem;

constexpr int kRepeats = 10;
constexpr std::uint64_t kSeed = 1;
const double kPi = std::acos(-1.0);
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// ---- experiments -----------------------------------------------------------

class Experiments {
 public:
  explicit Experiments(int jobs) : jobs_(jobs) {}

  const RunReport& get(BenchmarkCase c, Algorithm a, std::uint64_t budget,
                       const std::vector<approx::Method>& methods) {
    std::string key = std::string(case_label(c)) + "/" + algorithm_name(a) + "/" + std::to_string(budget);
    for (auto m : methods) key += std::string("/") + approx::method_name(m);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ExperimentConfig cfg;
    cfg.benchmark_case = c;
    cfg.algorithm = a;
    cfg.budget = budget;
    cfg.repeats = kRepeats;
    cfg.seed = kSeed;
    cfg.methods = methods;
    cfg.jobs = jobs_;
    cfg.validate();
    return cache_.emplace(key, run_experiment(cfg)).first->second;
  }

 private:
  int jobs_;
  std::map<std::string, RunReport> cache_;
};

Stat stat(const RunReport& r, const std::string& metric) {
  auto it = r.aggregate.find(metric);
  if (it == r.aggregate.end()) return Stat{kNaN, kNaN, 0};
  return it->second;
}

std::vector<approx::Method> kriging_only() { return {approx::Method::kriging}; }

Result case2_hausdorff(Experiments& ex) {
  const double hms = stat(ex.get(BenchmarkCase::II, Algorithm::hms, 10000, kriging_only()), "hausdorff_kriging").mean;
  const double nea = stat(ex.get(BenchmarkCase::II, Algorithm::nea2, 10000, kriging_only()), "hausdorff_kriging").mean;
  Result r;
  r.pass = hms <= 0.9 && nea >= 1.1;
  r.summary = "case II @10000 Kriging Hausdorff: HMS " + fixed(hms) + " (<= 0.9), NEA2 " + fixed(nea) + " (>= 1.1)";
  return r;
}

Result case2_trend(Experiments& ex) {
  std::vector<Stat> hms, nea;
  for (std::uint64_t b = 2000; b <= 10000; b += 2000) {
    if (b <= 8000) hms.push_back(stat(ex.get(BenchmarkCase::II, Algorithm::hms, b, kriging_only()), "hausdorff_kriging"));
    nea.push_back(stat(ex.get(BenchmarkCase::II, Algorithm::nea2, b, kriging_only()), "hausdorff_kriging"));
  }
  bool monotone = true;
  std::string hms_means;
  for (std::size_t k = 0; k < hms.size(); ++k) {
    hms_means += (k ? " " : "") + fixed(hms[k].mean);
    if (k == 0) continue;
    const double pooled = std::sqrt(0.5 * (hms[k - 1].std * hms[k - 1].std + hms[k].std * hms[k].std));
    monotone = monotone && hms[k].mean <= hms[k - 1].mean + pooled;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : nea) {
    lo = std::min(lo, s.mean);
    hi = std::max(hi, s.mean);
  }
  Result r;
  r.pass = monotone && hi - lo < 0.15;
  r.summary = "case II Kriging Hausdorff: HMS 2000..8000 [" + hms_means + "] non-increasing within pooled std: " +
              (monotone ? "yes" : "no") + "; NEA2 spread " + fixed(hi - lo) + " (< 0.15)";
  return r;
}

Result case2_coverage(Experiments& ex) {
  const double h2 = stat(ex.get(BenchmarkCase::II, Algorithm::hms, 2000, kriging_only()), "coverage").mean;
  const double h10 = stat(ex.get(BenchmarkCase::II, Algorithm::hms, 10000, kriging_only()), "coverage").mean;
  const double n10 = stat(ex.get(BenchmarkCase::II, Algorithm::nea2, 10000, kriging_only()), "coverage").mean;
  Result r;
  r.pass = h10 - h2 >= 0.1 && h10 > n10;
  r.summary = "case II coverage: HMS " + fixed(h2) + " -> " + fixed(h10) + " (gain >= 0.1), NEA2 @10000 " + fixed(n10) +
              " (< HMS)";
  return r;
}

std::vector<approx::Method> case3_methods() { return {approx::Method::kriging, approx::Method::H1}; }

Result case3_minima(Experiments& ex) {
  const auto& hms = ex.get(BenchmarkCase::III, Algorithm::hms, 50000, case3_methods());
  const auto& nea = ex.get(BenchmarkCase::III, Algorithm::nea2, 50000, kriging_only());
  const double hc = stat(hms, "minima_coverage").mean, nc = stat(nea, "minima_coverage").mean;
  const double hk = stat(hms, "hausdorff_kriging").mean, nk = stat(nea, "hausdorff_kriging").mean;
  Result r;
  r.pass = hc - nc >= 0.05 && hk < nk;
  r.summary = "case III @50000 minima coverage: HMS " + fixed(hc) + " vs NEA2 " + fixed(nc) +
              " (>= +0.05); Kriging Hausdorff HMS " + fixed(hk) + " vs NEA2 " + fixed(nk) + " (HMS lower)";
  return r;
}

Result case3_h1(Experiments& ex) {
  const auto& hms = ex.get(BenchmarkCase::III, Algorithm::hms, 50000, case3_methods());
  const double h1 = stat(hms, "hausdorff_h1").mean, k = stat(hms, "hausdorff_kriging").mean;
  Result r;
  r.pass = h1 - k >= 1.0;
  r.summary = "case III HMS Hausdorff: H1 " + fixed(h1) + " vs Kriging " + fixed(k) + " (gap >= 1.0)";
  return r;
}

Result case1_clusters(Experiments& ex) {
  const auto& rep = ex.get(BenchmarkCase::I, Algorithm::hms, 500, {});
  int ok = 0;
  std::string counts;
  for (const auto& run : rep.runs) {
    if (!run.failed && run.reduced_clusters >= 3 && run.reduced_clusters <= 5) ++ok;
    counts += (counts.empty() ? "" : " ") + (run.failed ? std::string("x") : std::to_string(run.reduced_clusters));
  }
  Result r;
  r.pass = ok >= 8;
  r.summary = "case I @500 HMS reduced clusters in [3,5]: " + std::to_string(ok) + "/" +
              std::to_string(rep.runs.size()) + " runs (>= 8) [" + counts + "]";
  return r;
}

// ---- property checks -------------------------------------------------------

// Benchmark formulas written out directly.
double g_formula(double x1, double x2, double c1, double c2, double r1, double r2) {
  const double q = (x1 - c1) * (x1 - c1) / (r1 * r1) + (x2 - c2) * (x2 - c2) / (r2 * r2);
  return 1.0 - std::exp(-std::log(2.0) * q);
}

double c_formula(double x1, double x2, double phi) {
  const double y1 = x1 * std::cos(phi) - x2 * std::sin(phi);
  const double y2 = x1 * std::sin(phi) + x2 * std::cos(phi);
  return g_formula(y1, y2, -0.8, 0, 0.5, 1) * g_formula(y1, y2, 0, -0.8, 1, 0.5) *
         g_formula(y1, y2, 0.8, 0, 0.5, 1);
}

double tiles_formula(double x1, double x2, int n) {
  double h = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) h *= c_formula(x1 - (2 + 4 * i), x2 - (2 + 4 * j), kPi / 2 * ((i + j) % 4));
  }
  return std::max((h - 0.1) / 0.9, 0.0);
}

double f3_formula(const Vector& x) {
  double s = std::cos(kPi * x[0] / 5);
  for (int i = 1; i < 4; ++i) s += std::cos(kPi * x[i]);
  return 2.0 - 0.5 * s;
}

Result benchmark_oracles() {
  const auto b1 = benchmark(BenchmarkCase::I);
  const auto b2 = benchmark(BenchmarkCase::II);
  const auto b3 = benchmark(BenchmarkCase::III);
  Rng rng(7001);
  std::uniform_real_distribution<double> u6(0, 6), u20(0, 20), u5(-5, 5), u2(-2, 2);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    Vector a(2), b(2), c(4);
    a << u6(rng), u6(rng);
    b << u20(rng), u20(rng);
    c << u5(rng), u2(rng), u2(rng), u2(rng);
    worst = std::max(worst, std::abs(b1.problem.objective()(a) - tiles_formula(a[0], a[1], 2)));
    worst = std::max(worst, std::abs(b2.problem.objective()(b) - tiles_formula(b[0], b[1], 5)));
    worst = std::max(worst, std::abs(b3.problem.objective()(c) - f3_formula(c)));
  }
  const std::size_t n1 = exact_region_points(b1.problem, b1.truth.region_cutoff, 0.05).size();
  const std::size_t n2 = exact_region_points(b2.problem, b2.truth.region_cutoff, 0.05).size();
  Result r;
  r.pass = worst <= 1e-12 && n1 == 4 && n2 == 25;
  std::ostringstream os;
  os << std::scientific << std::setprecision(1) << "f1/f2/f3 vs formulas on 3x10^4 points, max error " << worst
     << " (<= 1e-12); components " << n1 << "/" << n2 << " (4/25)";
  r.summary = os.str();
  return r;
}

Problem box_problem(int n, double half, Problem::Objective f) {
  return Problem("check", Box(Vector::Constant(n, -half), Vector::Constant(n, half)), std::move(f));
}

Result cma_checks() {
  int sphere_ok = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    auto p = box_problem(2, 10, [](const Vector& x) { return x.squaredNorm(); });
    EvalBudget budget(2000);
    Evaluator eval(p, budget);
    StopSpec stop;
    stop.stagnation_tol = -1.0;
    stop.stop_fitness = 1e-8;
    Rng rng(seed);
    const auto st = cma_run(eval, Vector::Ones(2), 0.5, stop, rng);
    sphere_ok += st.best && st.best->value < 1e-8;
  }
  int flat_ok = 0;
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
    flat_ok += st.stop == StopReason::sigma_increase && st.iteration <= 50;
  }
  Result r;
  r.pass = sphere_ok >= 9 && flat_ok >= 18;
  r.summary = "CMA-ES sphere < 1e-8 within 2000 evals: " + std::to_string(sphere_ok) +
              "/10 (>= 9); flat sigma-increase stop within 50 iterations: " + std::to_string(flat_ok) + "/20 (>= 18)";
  return r;
}

// O(n^2) nearest-better clustering with both cuts.
std::vector<int> nbc_oracle(const std::vector<EvaluatedPoint>& pts, double phi, double b) {
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
  double total = 0.0;
  int edges = 0;
  for (int i = 0; i < n; ++i) {
    if (parent[i] >= 0) {
      total += len[i];
      ++edges;
    }
  }
  const double mean = edges ? total / edges : 0.0;
  std::vector<char> keep(n, 0);
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
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

Result nbc_checks() {
  Rng rng(9001);
  std::uniform_real_distribution<double> u(0, 1);
  int ok = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(u(rng) * 50);
    const int d = 1 + t % 4;
    std::vector<EvaluatedPoint> pts;
    for (int i = 0; i < n; ++i) {
      EvaluatedPoint p;
      p.x.resize(d);
      for (int k = 0; k < d; ++k) p.x[k] = u(rng);
      p.value = t % 3 == 0 ? std::round(u(rng) * 4) : u(rng);
      p.index = static_cast<std::uint64_t>(i);
      pts.push_back(p);
    }
    NbcParams params;
    params.phi = 1.0 + u(rng) * 2.0;
    params.b = 1.0 + u(rng) * 3.0;
    ok += same_partition(nbc_graph(pts, params).component, nbc_oracle(pts, params.phi, params.b));
  }
  Result r;
  r.pass = ok == 200;
  r.summary = "NBC partition equals the brute-force oracle on " + std::to_string(ok) + "/200 instances";
  return r;
}

std::vector<Vector> random_points(Rng& rng, int n, int d, bool lattice) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Vector> pts;
  for (int i = 0; i < n; ++i) {
    Vector x(d);
    for (int k = 0; k < d; ++k) x[k] = u(rng);
    if (lattice) x = (x * 5).array().round() / 5;
    if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
  }
  return pts;
}

Result approximation_checks() {
  Rng rng(11001);
  std::normal_distribution<double> z;

  // Delaunay: random and lattice inputs, plus the local clusters of a pipeline run
  int complexes = 0, empty_ok = 0;
  auto check_complex = [&](const std::vector<Vector>& pts) {
    try {
      approx::Delaunay del(pts);
      ++complexes;
      empty_ok += del.empty_circumsphere_check();
    } catch (const DegenerateGeometry&) {
    }
  };
  for (int d = 2; d <= 4; ++d) {
    for (int t = 0; t < 30; ++t) check_complex(random_points(rng, d + 2 + 2 * t, d, t % 2 == 1));
  }
  ExperimentConfig cfg;
  cfg.methods.clear();
  const auto art = run_pipeline(cfg, 1);
  for (const auto& c : art.local) {
    std::vector<Vector> pts;
    std::vector<double> vals;
    for (const auto& p : c.points) {
      pts.push_back(p.x);
      vals.push_back(p.value);
    }
    approx::merge_duplicates(pts, vals);
    check_complex(pts);
  }

  // L2 projection of affine data
  double affine_err = 0.0;
  {
    const auto pts = random_points(rng, 40, 2, false);
    Vector g(2);
    g << z(rng), z(rng);
    const double c = z(rng);
    std::vector<double> vals;
    for (const auto& p : pts) vals.push_back(c + g.dot(p));
    const approx::SimplicialInterpolant interp(pts, vals);
    const Box box(Vector::Constant(2, -0.1), Vector::Constant(2, 1.1));
    const auto model = approx::bspline_project(interp, box, {8, 8}, approx::Projection::L2);
    std::uniform_real_distribution<double> u(-0.1, 1.1);
    for (int t = 0; t < 100; ++t) {
      Vector x(2);
      x << u(rng), u(rng);
      affine_err = std::max(affine_err, std::abs(model.value(x) - (c + g.dot(x))));
    }
  }

  // Kriging interpolation
  double krig_err = 0.0;
  for (int d = 2; d <= 4; ++d) {
    const auto pts = random_points(rng, 60, d, false);
    std::vector<double> vals;
    for (const auto& p : pts) vals.push_back(std::sin(3 * p[0]) + p.squaredNorm());
    const auto k = approx::KrigingModel::fit(pts, vals);
    for (std::size_t i = 0; i < pts.size(); ++i) krig_err = std::max(krig_err, std::abs(k.predict(pts[i]) - vals[i]));
  }

  // partition of unity
  double pu_err = 0.0;
  for (int d = 1; d <= 4; ++d) {
    Box box(Vector::Constant(d, -1.0), Vector::Constant(d, 3.0));
    std::vector<int> cells(static_cast<std::size_t>(d), 2 + d);
    std::size_t n = 1;
    for (int c : cells) n *= static_cast<std::size_t>(c + 2);
    const approx::BsplineModel m(box, cells, Vector::Zero(static_cast<Eigen::Index>(n)));
    std::uniform_real_distribution<double> u(-1, 3);
    for (int t = 0; t < 200; ++t) {
      Vector x(d);
      for (int a = 0; a < d; ++a) x[a] = u(rng);
      pu_err = std::max(pu_err, std::abs(m.basis_sum(x) - 1.0));
    }
  }

  Result r;
  r.pass = complexes > 0 && empty_ok == complexes && affine_err <= 1e-6 && krig_err <= 1e-6 && pu_err <= 1e-10;
  std::ostringstream os;
  os << std::scientific << std::setprecision(1) << "empty circumspheres " << empty_ok << "/" << complexes
     << " complexes; L2 affine error " << affine_err << " (<= 1e-6); Kriging training error " << krig_err
     << " (<= 1e-6); partition of unity error " << pu_err << " (<= 1e-10)";
  r.summary = os.str();
  return r;
}

PointCloud random_cloud(Rng& rng, int n, int d, double spread) {
  std::uniform_real_distribution<double> u(0, spread);
  PointCloud c(d);
  for (int i = 0; i < n; ++i) {
    Vector x(d);
    for (int k = 0; k < d; ++k) x[k] = u(rng);
    c.push_back(x);
  }
  return c;
}

double hausdorff_oracle(const PointCloud& a, const PointCloud& b) {
  auto directed = [](const PointCloud& p, const PointCloud& q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < q.size(); ++j) {
        double s = 0.0;
        for (int k = 0; k < p.dim(); ++k) {
          const double t = q.coord(j, k) - p.coord(i, k);
          s += t * t;
        }
        best = std::min(best, s);
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

Result metric_checks() {
  Rng rng(12001);
  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    const int d = 2 + t % 3;
    const auto a = random_cloud(rng, 1 + t * 3, d, 1.0 + t % 4);
    const auto b = random_cloud(rng, 1 + (t * 7) % 150, d, 0.5);
    exact += hausdorff(a, b) == hausdorff_oracle(a, b);
  }
  int axioms = 0;
  for (int t = 0; t < 30; ++t) {
    const auto a = random_cloud(rng, 20, 2, 1);
    const auto b = random_cloud(rng, 25, 2, 2);
    const auto c = random_cloud(rng, 15, 2, 3);
    axioms += hausdorff(a, a) == 0.0 && hausdorff(a, b) == hausdorff(b, a) && hausdorff(a, b) >= 0.0 &&
              hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-12;
  }
  int monotone = 0;
  std::uniform_real_distribution<double> u(0, 2);
  for (int t = 0; t < 20; ++t) {
    Cluster cl;
    Vector c(2);
    c << u(rng), u(rng);
    for (int i = 0; i < 25; ++i) {
      Vector x(2);
      x << u(rng), u(rng);
      cl.points.push_back(EvaluatedPoint{x, (x - c).squaredNorm(), static_cast<std::uint64_t>(i)});
    }
    const Box dom(Vector::Zero(2), Vector::Constant(2, 2));
    const auto method = t % 3 == 0 ? approx::Method::kriging : (t % 3 == 1 ? approx::Method::L2 : approx::Method::H1);
    const auto fit = approx::fit_surrogate(cl, method, approx::GridSpec{}, dom);
    const auto s = std::make_shared<const approx::Surrogate>(fit.surrogate);
    bool ok = true;
    PointCloud prev(2);
    for (double eps : {0.01, 0.05, 0.1, 0.3, 1.0}) {
      const auto r = level_set(s, cl, eps, 0.05, Vector::Zero(2));
      if (!prev.empty()) {
        const GridIndex idx(r.points);
        for (std::size_t i = 0; i < prev.size() && ok; ++i) ok = idx.nearest_sq(prev.point(i).data()) == 0.0;
      }
      prev = r.points;
    }
    monotone += ok;
  }
  Result r;
  r.pass = exact == 100 && axioms == 30 && monotone == 20;
  r.summary = "Hausdorff equals the O(nm) oracle on " + std::to_string(exact) + "/100 pairs; axioms on " +
              std::to_string(axioms) + "/30 triples; level sets nested in epsilon on " + std::to_string(monotone) +
              "/20 surrogates";
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Result cli_determinism(const Options& opt) {
  Result r;
  if (opt.cli_path.empty()) {
    r.summary = "no regionmap executable given";
    return r;
  }
  const fs::path root = fs::temp_directory_path() / ("regionmap-determinism-" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  std::string csv[2];
  int status[2] = {0, 0};
  for (int k = 0; k < 2; ++k) {
    const fs::path out = root / ("run" + std::to_string(k));
    const std::string cmd = "\"" + opt.cli_path +
                            "\" run --case I --algo hms --budget 500 --repeats 2 --seed 7 --methods l2,h1,kriging --out \"" +
                            out.string() + "\" > \"" + (root / ("log" + std::to_string(k))).string() + "\" 2>&1";
    status[k] = std::system(cmd.c_str());
    csv[k] = slurp(out / "metrics.csv");
  }
  fs::remove_all(root);
  r.pass = status[0] == 0 && status[1] == 0 && !csv[0].empty() && csv[0] == csv[1];
  r.summary = std::string("two CLI runs (case I, seed 7) give ") +
              (csv[0] == csv[1] ? "byte-identical" : "different") + " metrics.csv (" +
              std::to_string(csv[0].size()) + " bytes)" + (status[0] || status[1] ? ", nonzero exit" : "");
  return r;
}

}  // namespace

std::vector<Result> run(const Options& options, bool print) {
  Experiments ex(std::max(1, options.jobs));
  auto wanted = [&](int id) {
    return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
  };
  const std::vector<std::pair<int, std::function<Result()>>> checks = {
      {1, [&] { return case2_hausdorff(ex); }},
      {2, [&] { return case2_trend(ex); }},
      {3, [&] { return case2_coverage(ex); }},
      {4, [&] { return case3_minima(ex); }},
      {5, [&] { return case3_h1(ex); }},
      {6, [&] { return case1_clusters(ex); }},
      {7, benchmark_oracles},
      {8, cma_checks},
      {9, nbc_checks},
      {10, approximation_checks},
      {11, metric_checks},
      {12, [&] { return cli_determinism(options); }},
  };
  std::vector<Result> out;
  for (const auto& [id, check] : checks) {
    if (!wanted(id)) continue;
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r.pass = false;
      r.summary = std::string("error: ") + e.what();
    }
    r.id = id;
    if (print) std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << id << "  " << r.summary << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace regionmap::acceptance
