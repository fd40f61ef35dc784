#include "regionmap/approx/surrogate.hpp"

#include <algorithm>

namespace regionmap::approx {

using nlohmann::json;

Method parse_method(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "l2") return Method::L2;
  if (s == "h1") return Method::H1;
  if (s == "kriging") return Method::kriging;
  throw ConfigError("unknown approximation method '" + std::string(name) + "'");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::L2:
      return "l2";
    case Method::H1:
      return "h1";
    case Method::kriging:
      return "kriging";
  }
  return "?";
}

void GridSpec::validate() const {
  if (cells_per_axis < 0) throw ConfigError("grid cells_per_axis must be >= 0");
  if (!(inflate >= 0.0)) throw ConfigError("grid inflate must be >= 0");
}

int GridSpec::resolved_cells(int dim) const {
  if (cells_per_axis > 0) return cells_per_axis;
  return dim == 2 ? 8 : 4;
}

Surrogate::Surrogate(Method method, Box domain, BsplineModel model)
    : method_(method), domain_(std::move(domain)), model_(std::move(model)) {
  if (method_ == Method::kriging) throw InvalidArgument("spline surrogate with kriging method");
}

Surrogate::Surrogate(Box domain, KrigingModel model)
    : method_(Method::kriging), domain_(std::move(domain)), model_(std::move(model)) {}

std::vector<char> Surrogate::grid_at_or_below(const std::vector<std::vector<double>>& axes,
                                              double level) const {
  if (const auto* k = kriging()) return k->grid_at_or_below(axes, level);
  const std::vector<double> v = bspline()->grid_values(axes);
  std::vector<char> mask(v.size());
  for (std::size_t f = 0; f < v.size(); ++f) mask[f] = v[f] <= level;
  return mask;
}

double Surrogate::value(const Vector& x) const {
  if (const auto* b = bspline()) return b->value(x);
  return kriging()->predict(x);
}

namespace {

json vec(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json Surrogate::to_json() const {
  json j;
  j["method"] = method_name(method_);
  j["domain"] = {{"lower", vec(domain_.lower)}, {"upper", vec(domain_.upper)}};
  if (const auto* b = bspline()) {
    j["bspline"] = {{"box", {{"lower", vec(b->box().lower)}, {"upper", vec(b->box().upper)}}},
                    {"cells", b->cells()},
                    {"coefficients", vec(b->coefficients())}};
  } else {
    const KrigingModel& k = *kriging();
    json pts = json::array();
    for (std::size_t i = 0; i < k.size(); ++i) pts.push_back(vec(k.points().point(i)));
    j["kriging"] = {{"length_scale", k.length_scale()},
                    {"nugget", k.nugget()},
                    {"mean", k.mean()},
                    {"points", pts},
                    {"values", k.values()},
                    {"alpha", vec(k.alpha())}};
  }
  return j;
}

Surrogate Surrogate::from_json(const json& j) {
  const Method m = parse_method(j.at("method").get<std::string>());
  Box domain(to_vec(j.at("domain").at("lower")), to_vec(j.at("domain").at("upper")));
  if (m == Method::kriging) {
    const json& k = j.at("kriging");
    std::vector<Vector> pts;
    for (const auto& p : k.at("points")) pts.push_back(to_vec(p));
    return Surrogate(std::move(domain),
                     KrigingModel::from_parts(pts, k.at("values").get<std::vector<double>>(),
                                              k.at("length_scale").get<double>(),
                                              k.at("nugget").get<double>()));
  }
  const json& b = j.at("bspline");
  Box box(to_vec(b.at("box").at("lower")), to_vec(b.at("box").at("upper")));
  return Surrogate(m, std::move(domain),
                   BsplineModel(std::move(box), b.at("cells").get<std::vector<int>>(),
                                to_vec(b.at("coefficients"))));
}

Box surrogate_domain(const Cluster& cluster, const GridSpec& grid, const Box& problem_domain) {
  if (cluster.points.empty()) throw InvalidArgument("surrogate_domain: empty cluster");
  Box b = Box::bounding(cluster.points);
  // a flat box would give zero-width cells
  const Vector floor_extent = 0.01 * problem_domain.extent();
  for (int a = 0; a < b.dim(); ++a) {
    const double pad = 0.5 * std::max(floor_extent[a] - (b.upper[a] - b.lower[a]), 0.0);
    b.lower[a] -= pad;
    b.upper[a] += pad;
  }
  return b.inflated(grid.inflate).intersect(problem_domain);
}

namespace {

SurrogateFit fit_kriging(const Cluster& cluster, const Box& domain, Method requested) {
  std::vector<Vector> pts;
  std::vector<double> vals;
  for (const auto& p : cluster.points) {
    pts.push_back(p.x);
    vals.push_back(p.value);
  }
  return SurrogateFit{Surrogate(domain, KrigingModel::fit(pts, vals)), requested, false, {}};
}

}  // namespace

SurrogateFit fit_surrogate(const Cluster& cluster, Method method, const GridSpec& grid,
                           const Box& problem_domain) {
  grid.validate();
  const Box domain = surrogate_domain(cluster, grid, problem_domain);
  if (method == Method::kriging) return fit_kriging(cluster, domain, method);

  const int d = problem_domain.dim();
  std::string failure;
  try {
    if (static_cast<int>(cluster.points.size()) < d + 1) {
      throw DegenerateGeometry("fewer than d+1 points");
    }
    std::vector<Vector> pts;
    std::vector<double> vals;
    for (const auto& p : cluster.points) {
      pts.push_back(p.x);
      vals.push_back(p.value);
    }
    const SimplicialInterpolant interp(pts, vals);
    const std::vector<int> cells(static_cast<std::size_t>(d), grid.resolved_cells(d));
    BsplineModel model = bspline_project(
        interp, domain, cells, method == Method::L2 ? Projection::L2 : Projection::H1);
    return SurrogateFit{Surrogate(method, domain, std::move(model)), method, false, {}};
  } catch (const Error& e) {
    failure = e.what();
  }
  SurrogateFit fit = fit_kriging(cluster, domain, method);
  fit.downgraded = true;
  fit.note = std::string(method_name(method)) + " fit failed (" + failure + "); used kriging";
  return fit;
}

}  // namespace regionmap::approx
