#pragma once

#include <cstdint>

#include "ifsynth/core/tensor.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ifsynth::par {

enum class Backend { serial, openmp };

Backend backend();
void set_backend(Backend b);
int thread_count();
void set_thread_count(int n);

// Static partition over [0,n). Results must not depend on iteration
// interleaving; each index writes disjoint outputs.
template <class F>
void for_n(i64 n, F&& f) {
  if (backend() == Backend::serial) {
    for (i64 i = 0; i < n; ++i) f(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < n; ++i) f(i);
#else
  for (i64 i = 0; i < n; ++i) f(i);
#endif
}

// Deterministic reduction: fixed block partition independent of thread
// count, partials combined in block order.
double sum(const double* p, i64 n);
double sum_sq(const double* p, i64 n);
double dot(const double* a, const double* b, i64 n);

}  // namespace ifsynth::par
