// Built with -mavx2 (no -mfma): see src/CMakeLists.txt.
#include "regionmap/simd/distance_kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace regionmap::simd::avx2 {

#if defined(__AVX2__)

bool compiled() { return true; }

namespace {

inline __m256d block_sq_distance(const double* query, const ColumnView& pts, std::size_t i) {
  __m256d acc = _mm256_setzero_pd();
  for (int c = 0; c < pts.dim; ++c) {
    const __m256d q = _mm256_set1_pd(query[c]);
    const __m256d p = _mm256_loadu_pd(pts.columns[c] + i);
    const __m256d d = _mm256_sub_pd(q, p);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  return acc;
}

}  // namespace

void squared_distances(const double* query, const ColumnView& pts, std::size_t begin,
                       std::size_t end, double* out) {
  std::size_t i = begin;
  for (; i + 4 <= end; i += 4) {
    _mm256_storeu_pd(out + (i - begin), block_sq_distance(query, pts, i));
  }
  if (i < end) scalar::squared_distances(query, pts, i, end, out + (i - begin));
}

Nearest nearest(const double* query, const ColumnView& pts, std::size_t begin, std::size_t end) {
  std::size_t i = begin;
  Nearest best;
  if (end - begin >= 4) {
    __m256d best_val = _mm256_set1_pd(best.sq_distance);
    // lane indices travel as doubles; exact for any realistic point count
    __m256d best_idx = _mm256_setzero_pd();
    __m256d idx = _mm256_setr_pd(static_cast<double>(begin), static_cast<double>(begin + 1),
                                 static_cast<double>(begin + 2), static_cast<double>(begin + 3));
    const __m256d step = _mm256_set1_pd(4.0);
    for (; i + 4 <= end; i += 4) {
      const __m256d acc = block_sq_distance(query, pts, i);
      const __m256d lt = _mm256_cmp_pd(acc, best_val, _CMP_LT_OQ);
      best_val = _mm256_blendv_pd(best_val, acc, lt);
      best_idx = _mm256_blendv_pd(best_idx, idx, lt);
      idx = _mm256_add_pd(idx, step);
    }
    alignas(32) double vals[4];
    alignas(32) double idxs[4];
    _mm256_store_pd(vals, best_val);
    _mm256_store_pd(idxs, best_idx);
    for (int lane = 0; lane < 4; ++lane) {
      const auto li = static_cast<std::size_t>(idxs[lane]);
      if (vals[lane] < best.sq_distance ||
          (vals[lane] == best.sq_distance && li < best.index)) {
        best.sq_distance = vals[lane];
        best.index = li;
      }
    }
  }
  if (i < end) {
    const Nearest tail = scalar::nearest(query, pts, i, end);
    if (tail.sq_distance < best.sq_distance) best = tail;
  }
  return best;
}

#else

bool compiled() { return false; }

void squared_distances(const double* query, const ColumnView& pts, std::size_t begin,
                       std::size_t end, double* out) {
  scalar::squared_distances(query, pts, begin, end, out);
}

Nearest nearest(const double* query, const ColumnView& pts, std::size_t begin, std::size_t end) {
  return scalar::nearest(query, pts, begin, end);
}

#endif

}  // namespace regionmap::simd::avx2
