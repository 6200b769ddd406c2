#include "ifsynth/core/parallel.h"

#include <algorithm>
#include <vector>

namespace ifsynth::par {

namespace {
Backend g_backend = Backend::openmp;
}

Backend backend() { return g_backend; }
void set_backend(Backend b) { g_backend = b; }

int thread_count() {
#ifdef _OPENMP
  return g_backend == Backend::serial ? 1 : omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace {

constexpr i64 kBlocks = 256;

template <class BlockFn>
double blocked_reduce(i64 n, BlockFn&& fn) {
  if (n == 0) return 0.0;
  i64 nblk = std::min<i64>(kBlocks, n);
  i64 step = (n + nblk - 1) / nblk;
  std::vector<double> partial((size_t)nblk, 0.0);
  for_n(nblk, [&](i64 b) {
    i64 lo = b * step, hi = std::min(n, lo + step);
    double acc = 0.0;
    for (i64 i = lo; i < hi; ++i) acc += fn(i);
    partial[(size_t)b] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace

double sum(const double* p, i64 n) {
  return blocked_reduce(n, [&](i64 i) { return p[i]; });
}

double sum_sq(const double* p, i64 n) {
  return blocked_reduce(n, [&](i64 i) { return p[i] * p[i]; });
}

double dot(const double* a, const double* b, i64 n) {
  return blocked_reduce(n, [&](i64 i) { return a[i] * b[i]; });
}

}  // namespace ifsynth::par
