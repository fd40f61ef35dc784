#pragma once

// Squared-Euclidean distance kernels over column-major point blocks.
//
// Every kernel has a scalar reference and an AVX2 variant. The active variant
// is picked once at startup from CPUID (override with REGIONMAP_SIMD=scalar).
// Both variants accumulate (q_c - p_c)^2 in coordinate order without fused
// multiply-add, so their results are bit-identical; the equivalence tests
// rely on that.

#include <array>
#include <cstddef>
#include <limits>

namespace regionmap::simd {

inline constexpr int kMaxDim = 8;

struct ColumnView {
  std::array<const double*, kMaxDim> columns{};
  std::size_t size = 0;
  int dim = 0;
};

struct Nearest {
  double sq_distance = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
};

enum class Isa { scalar, avx2 };

using SquaredDistancesFn = void (*)(const double* query, const ColumnView& pts, std::size_t begin,
                                    std::size_t end, double* out);
using NearestFn = Nearest (*)(const double* query, const ColumnView& pts, std::size_t begin,
                              std::size_t end);

namespace scalar {
void squared_distances(const double* query, const ColumnView& pts, std::size_t begin,
                       std::size_t end, double* out);
Nearest nearest(const double* query, const ColumnView& pts, std::size_t begin, std::size_t end);
}  // namespace scalar

namespace avx2 {
bool compiled();
void squared_distances(const double* query, const ColumnView& pts, std::size_t begin,
                       std::size_t end, double* out);
Nearest nearest(const double* query, const ColumnView& pts, std::size_t begin, std::size_t end);
}  // namespace avx2

/// True when the CPU and the build both support the AVX2 path.
bool avx2_available();
Isa active_isa();
/// Test hook; requesting avx2 on a machine without it falls back to scalar.
void force_isa(Isa isa);
const char* isa_name(Isa isa);

/// out[i - begin] = |query - pts[i]|^2 for i in [begin, end).
void squared_distances(const double* query, const ColumnView& pts, std::size_t begin,
                       std::size_t end, double* out);
/// Minimum squared distance over [begin, end); ties resolve to the lowest index.
Nearest nearest(const double* query, const ColumnView& pts, std::size_t begin, std::size_t end);

}  // namespace regionmap::simd
