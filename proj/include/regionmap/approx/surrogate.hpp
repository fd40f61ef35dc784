#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "regionmap/approx/bspline.hpp"
#include "regionmap/approx/kriging.hpp"
#include "regionmap/cluster.hpp"

namespace regionmap::approx {

enum class Method { L2, H1, kriging };

Method parse_method(std::string_view name);
const char* method_name(Method m);

struct GridSpec {
  /// 0 picks 8 cells per axis in 2D and 4 otherwise.
  int cells_per_axis = 0;
  /// Fraction of the cluster's bounding box added on every side.
  double inflate = 0.1;

  void validate() const;
  int resolved_cells(int dim) const;
};

/// A fitted local model f~ with its domain.
class Surrogate {
 public:
  Surrogate(Method method, Box domain, BsplineModel model);
  Surrogate(Box domain, KrigingModel model);

  Method method() const { return method_; }
  const Box& domain() const { return domain_; }
  double value(const Vector& x) const;
  /// value(x) <= level over the grid axes[0] x ... x axes[d-1], last axis fastest.
  std::vector<char> grid_at_or_below(const std::vector<std::vector<double>>& axes,
                                     double level) const;

  const BsplineModel* bspline() const { return std::get_if<BsplineModel>(&model_); }
  const KrigingModel* kriging() const { return std::get_if<KrigingModel>(&model_); }

  nlohmann::json to_json() const;
  static Surrogate from_json(const nlohmann::json& j);

 private:
  Method method_;
  Box domain_;
  std::variant<BsplineModel, KrigingModel> model_;
};

struct SurrogateFit {
  Surrogate surrogate;
  Method requested;
  /// Set when the requested spline fit failed and Kriging was used instead.
  bool downgraded = false;
  std::string note;
};

/// Box the cluster's surrogate lives on: bounding box of its points,
/// inflated, clipped to the problem domain.
Box surrogate_domain(const Cluster& cluster, const GridSpec& grid, const Box& problem_domain);

/// Spline failures fall back to Kriging; Kriging failures propagate.
SurrogateFit fit_surrogate(const Cluster& cluster, Method method, const GridSpec& grid,
                           const Box& problem_domain);

}  // namespace regionmap::approx
