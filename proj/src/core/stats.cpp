#include "ifsynth/core/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ifsynth::stats {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / (double)v.size();
}

double variance(std::span<const double> v, int ddof) {
  const i64 n = (i64)v.size();
  if (n <= ddof) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / (double)(n - ddof);
}

double stddev(std::span<const double> v, int ddof) { return std::sqrt(variance(v, ddof)); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::runtime_error("percentile of empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const size_t k = (size_t)std::floor(q * (double)(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::runtime_error("pearson: size mismatch");
  const double ma = mean(a), mb = mean(b);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sxy += da * db;
    sxx += da * da;
    syy += db * db;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nan("");
  return sxy / std::sqrt(sxx * syy);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::runtime_error("cosine: size mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  const i64 n1 = (i64)a.size(), n2 = (i64)b.size();
  if (n1 == 0 || n2 == 0) throw std::runtime_error("mann_whitney_u: empty sample");

  struct Obs {
    double v;
    int group;
  };
  std::vector<Obs> all;
  all.reserve((size_t)(n1 + n2));
  for (double v : a) all.push_back({v, 0});
  for (double v : b) all.push_back({v, 1});
  std::sort(all.begin(), all.end(), [](const Obs& x, const Obs& y) { return x.v < y.v; });

  // midranks + tie correction term sum(t^3 - t)
  const i64 n = n1 + n2;
  std::vector<double> rank((size_t)n);
  double tie_term = 0.0;
  for (i64 i = 0; i < n;) {
    i64 j = i;
    while (j < n && all[(size_t)j].v == all[(size_t)i].v) ++j;
    const double r = 0.5 * (double)(i + j - 1) + 1.0;
    for (i64 k = i; k < j; ++k) rank[(size_t)k] = r;
    const double t = (double)(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  double r1 = 0.0;
  for (i64 i = 0; i < n; ++i)
    if (all[(size_t)i].group == 0) r1 += rank[(size_t)i];

  const double u1 = r1 - (double)n1 * (n1 + 1) / 2.0;
  const double mu = (double)n1 * n2 / 2.0;
  const double sigma2 =
      (double)n1 * n2 / 12.0 * ((double)(n + 1) - tie_term / ((double)n * (n - 1)));

  MannWhitneyResult res;
  res.u = u1;
  res.median_a = median(std::vector<double>(a.begin(), a.end()));
  res.median_b = median(std::vector<double>(b.begin(), b.end()));
  if (sigma2 <= 0.0) {
    res.p = 1.0;
    return res;
  }
  const double z = (std::abs(u1 - mu) - 0.5) / std::sqrt(sigma2);  // continuity correction
  res.p = std::min(1.0, 2.0 * normal_sf(std::max(0.0, z)));
  return res;
}

double otsu_threshold(std::span<const double> v, double lo, double hi) {
  constexpr int kBins = 256;
  if (v.empty() || hi <= lo) return lo;
  std::array<i64, kBins> hist{};
  for (double x : v) {
    int b = (int)((x - lo) / (hi - lo) * kBins);
    b = std::clamp(b, 0, kBins - 1);
    ++hist[(size_t)b];
  }
  const double total = (double)v.size();
  double sum_all = 0.0;
  for (int i = 0; i < kBins; ++i) sum_all += (double)i * (double)hist[(size_t)i];

  double best_between = -1.0;
  int best_bin = 0;
  double w0 = 0.0, sum0 = 0.0;
  for (int t = 0; t < kBins - 1; ++t) {
    w0 += (double)hist[(size_t)t];
    if (w0 == 0.0) continue;
    const double w1 = total - w0;
    if (w1 == 0.0) break;
    sum0 += (double)t * (double)hist[(size_t)t];
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best_between) {
      best_between = between;
      best_bin = t;
    }
  }
  return lo + (hi - lo) * ((double)best_bin + 0.5) / kBins;
}

}  // namespace ifsynth::stats
