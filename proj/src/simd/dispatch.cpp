#include <atomic>
#include <cstdlib>
#include <cstring>

#include "regionmap/simd/distance_kernels.hpp"

namespace regionmap::simd {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("REGIONMAP_SIMD"); env && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() { return avx2::compiled() && cpu_has_avx2(); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void squared_distances(const double* query, const ColumnView& pts, std::size_t begin,
                       std::size_t end, double* out) {
  if (active_isa() == Isa::avx2) {
    avx2::squared_distances(query, pts, begin, end, out);
  } else {
    scalar::squared_distances(query, pts, begin, end, out);
  }
}

Nearest nearest(const double* query, const ColumnView& pts, std::size_t begin, std::size_t end) {
  return active_isa() == Isa::avx2 ? avx2::nearest(query, pts, begin, end)
                                   : scalar::nearest(query, pts, begin, end);
}

}  // namespace regionmap::simd
