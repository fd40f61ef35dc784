#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace regionmap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// CMA-ES sampling measure became unusable (non-finite or non-SPD covariance).
class EngineDegenerate : public Error {
 public:
  using Error::Error;
};

/// Point set does not span the ambient space.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// A domain point with its objective value and the global evaluation index
/// at which it was produced.
struct EvaluatedPoint {
  Vector x;
  double value = 0.0;
  std::uint64_t index = 0;
};

/// Strict weak order used everywhere fitness is ranked: value first, then the
/// earlier evaluation wins.
inline bool better(const EvaluatedPoint& a, const EvaluatedPoint& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.index < b.index;
}

/// Axis-aligned closed box.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x, double tol = 0.0) const;
  Vector clamp(const Vector& x) const;
  Vector extent() const { return upper - lower; }
  /// Inflate by `fraction` of the extent on every side.
  Box inflated(double fraction) const;
  Box intersect(const Box& other) const;

  static Box bounding(const std::vector<EvaluatedPoint>& points);
};

/// SplitMix64 finalizer; gives independent sub-streams from one base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

double euclidean(const Vector& a, const Vector& b);

}  // namespace regionmap
