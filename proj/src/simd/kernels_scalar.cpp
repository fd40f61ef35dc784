#include "regionmap/simd/distance_kernels.hpp"

namespace regionmap::simd::scalar {

void squared_distances(const double* query, const ColumnView& pts, std::size_t begin,
                       std::size_t end, double* out) {
  for (std::size_t i = begin; i < end; ++i) {
    double acc = 0.0;
    for (int c = 0; c < pts.dim; ++c) {
      const double d = query[c] - pts.columns[c][i];
      acc += d * d;
    }
    out[i - begin] = acc;
  }
}

Nearest nearest(const double* query, const ColumnView& pts, std::size_t begin, std::size_t end) {
  Nearest best;
  for (std::size_t i = begin; i < end; ++i) {
    double acc = 0.0;
    for (int c = 0; c < pts.dim; ++c) {
      const double d = query[c] - pts.columns[c][i];
      acc += d * d;
    }
    if (acc < best.sq_distance) {
      best.sq_distance = acc;
      best.index = i;
    }
  }
  return best;
}

}  // namespace regionmap::simd::scalar
