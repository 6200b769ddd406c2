#pragma once

#include <span>
#include <vector>

#include "ifsynth/core/tensor.h"

namespace ifsynth::stats {

double mean(std::span<const double> v);
double variance(std::span<const double> v, int ddof = 0);
double stddev(std::span<const double> v, int ddof = 0);
double median(std::vector<double> v);  // by value: partially sorts a copy

// Order-statistic quantile at index floor(q*(n-1)) of the sorted sample
// (pixel-count percentile; idempotent under monotone rescaling).
double percentile(std::vector<double> v, double q);

double pearson(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Standard normal survival function P(Z > z).
double normal_sf(double z);

struct MannWhitneyResult {
  double u = 0.0;       // U statistic of the first sample
  double p = 1.0;       // two-sided, normal approximation with tie correction
  double median_a = 0.0;
  double median_b = 0.0;
};
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Otsu threshold over a fixed 256-bin histogram of [lo,hi].
double otsu_threshold(std::span<const double> v, double lo = 0.0, double hi = 1.0);

}  // namespace ifsynth::stats
