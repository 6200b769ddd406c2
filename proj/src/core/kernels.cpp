#include "ifsynth/core/kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ifsynth/core/parallel.h"

namespace ifsynth::kernels {

namespace {

inline i64 idx3(int c, int y, int x, int h, int w) { return ((i64)c * h + y) * (i64)w + x; }

std::vector<double> gauss_taps(double sigma, int& radius) {
  radius = std::max(1, (int)std::ceil(3.0 * sigma));
  std::vector<double> k((size_t)(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double v = std::exp(-0.5 * (double)(i * i) / (sigma * sigma));
    k[(size_t)(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

inline int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

}  // namespace

// ---------------------------------------------------------------------------
// conv2d
// ---------------------------------------------------------------------------

void conv2d_forward(const Conv2dShape& s, const double* x, const double* wt,
                    const double* bias, double* y) {
  const int oh = s.out_h(), ow = s.out_w();
  par::for_n((i64)s.cout * oh, [&](i64 t) {
    const int co = (int)(t / oh), oy = (int)(t % oh);
    double* yrow = y + idx3(co, oy, 0, oh, ow);
    for (int ox = 0; ox < ow; ++ox) {
      double acc = bias ? bias[co] : 0.0;
      const int iy0 = oy * s.stride - s.pad;
      const int ix0 = ox * s.stride - s.pad;
      for (int ci = 0; ci < s.cin; ++ci) {
        const double* xc = x + idx3(ci, 0, 0, s.h, s.w);
        const double* wc = wt + ((i64)co * s.cin + ci) * s.kh * s.kw;
        for (int ky = 0; ky < s.kh; ++ky) {
          const int iy = iy0 + ky;
          if (iy < 0 || iy >= s.h) continue;
          const double* xrow = xc + (i64)iy * s.w;
          const double* wrow = wc + (i64)ky * s.kw;
          for (int kx = 0; kx < s.kw; ++kx) {
            const int ix = ix0 + kx;
            if (ix < 0 || ix >= s.w) continue;
            acc += xrow[ix] * wrow[kx];
          }
        }
      }
      yrow[ox] = acc;
    }
  });
}

void conv2d_grad_input(const Conv2dShape& s, const double* dy, const double* wt, double* dx) {
  const int oh = s.out_h(), ow = s.out_w();
  par::for_n((i64)s.cin * s.h, [&](i64 t) {
    const int ci = (int)(t / s.h), iy = (int)(t % s.h);
    double* dxrow = dx + idx3(ci, iy, 0, s.h, s.w);
    for (int ix = 0; ix < s.w; ++ix) {
      double acc = 0.0;
      for (int co = 0; co < s.cout; ++co) {
        const double* dyc = dy + idx3(co, 0, 0, oh, ow);
        const double* wc = wt + ((i64)co * s.cin + ci) * s.kh * s.kw;
        for (int ky = 0; ky < s.kh; ++ky) {
          const int ny = iy + s.pad - ky;
          if (ny < 0 || ny % s.stride != 0) continue;
          const int oy = ny / s.stride;
          if (oy >= oh) continue;
          for (int kx = 0; kx < s.kw; ++kx) {
            const int nx = ix + s.pad - kx;
            if (nx < 0 || nx % s.stride != 0) continue;
            const int ox = nx / s.stride;
            if (ox >= ow) continue;
            acc += dyc[(i64)oy * ow + ox] * wc[(i64)ky * s.kw + kx];
          }
        }
      }
      dxrow[ix] = acc;
    }
  });
}

void conv2d_grad_params(const Conv2dShape& s, const double* dy, const double* x, double* dw,
                        double* db) {
  const int oh = s.out_h(), ow = s.out_w();
  par::for_n((i64)s.cout * s.cin, [&](i64 t) {
    const int co = (int)(t / s.cin), ci = (int)(t % s.cin);
    const double* dyc = dy + idx3(co, 0, 0, oh, ow);
    const double* xc = x + idx3(ci, 0, 0, s.h, s.w);
    double* wc = dw + t * s.kh * s.kw;
    for (int ky = 0; ky < s.kh; ++ky) {
      for (int kx = 0; kx < s.kw; ++kx) {
        double acc = 0.0;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * s.stride - s.pad + ky;
          if (iy < 0 || iy >= s.h) continue;
          const double* xrow = xc + (i64)iy * s.w;
          const double* dyrow = dyc + (i64)oy * ow;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * s.stride - s.pad + kx;
            if (ix < 0 || ix >= s.w) continue;
            acc += dyrow[ox] * xrow[ix];
          }
        }
        wc[(i64)ky * s.kw + kx] = acc;
      }
    }
  });
  if (db) {
    par::for_n(s.cout, [&](i64 co) {
      const double* dyc = dy + idx3((int)co, 0, 0, oh, ow);
      double acc = 0.0;
      for (i64 i = 0; i < (i64)oh * ow; ++i) acc += dyc[i];
      db[co] = acc;
    });
  }
}

// ---------------------------------------------------------------------------
// matmul
// ---------------------------------------------------------------------------

void matmul(const double* a, const double* b, double* c, int m, int k, int n, bool ta, bool tb) {
  par::for_n(m, [&](i64 i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < k; ++l) {
        const double av = ta ? a[(i64)l * m + i] : a[i * k + l];
        const double bv = tb ? b[(i64)j * k + l] : b[(i64)l * n + j];
        acc += av * bv;
      }
      c[i * n + j] = acc;
    }
  });
}

// ---------------------------------------------------------------------------
// gaussian blur (separable, mirror borders)
// ---------------------------------------------------------------------------

void gaussian_blur(const double* src, int h, int w, double sigma, double* dst) {
  int radius;
  const auto k = gauss_taps(sigma, radius);
  std::vector<double> tmp((size_t)h * w);
  par::for_n(h, [&](i64 y) {
    const double* row = src + y * w;
    double* out = tmp.data() + y * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[(size_t)(i + radius)] * row[mirror(x + i, w)];
      out[x] = acc;
    }
  });
  par::for_n(h, [&](i64 y) {
    double* out = dst + y * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[(size_t)(i + radius)] * tmp[(size_t)mirror((int)y + i, h) * w + x];
      out[x] = acc;
    }
  });
}

// ---------------------------------------------------------------------------
// area resize
// ---------------------------------------------------------------------------

void resize_area(const double* src, int sh, int sw, double* dst, int dh, int dw) {
  const double sy = (double)sh / dh, sx = (double)sw / dw;
  par::for_n((i64)dh * dw, [&](i64 t) {
    const int y = (int)(t / dw), x = (int)(t % dw);
    const double y0 = y * sy, y1 = (y + 1) * sy;
    const double x0 = x * sx, x1 = (x + 1) * sx;
    const int iy0 = (int)std::floor(y0), iy1 = std::min(sh, (int)std::ceil(y1));
    const int ix0 = (int)std::floor(x0), ix1 = std::min(sw, (int)std::ceil(x1));
    double acc = 0.0, area = 0.0;
    for (int iy = iy0; iy < iy1; ++iy) {
      const double wy = std::min<double>(iy + 1, y1) - std::max<double>(iy, y0);
      for (int ix = ix0; ix < ix1; ++ix) {
        const double wx = std::min<double>(ix + 1, x1) - std::max<double>(ix, x0);
        acc += src[(i64)iy * sw + ix] * wy * wx;
        area += wy * wx;
      }
    }
    dst[t] = acc / area;
  });
}

// ---------------------------------------------------------------------------
// morphology (sliding min/max, truncated window at borders)
// ---------------------------------------------------------------------------

namespace {

template <bool Max>
void sliding_1d(const double* in, i64 stride_in, double* out, i64 stride_out, int n, int r) {
  // monotonic wedge over window [i-r, i+r]
  std::vector<int> q((size_t)n);
  int head = 0, tail = 0;  // [head, tail)
  auto better = [](double a, double b) { return Max ? a >= b : a <= b; };
  for (int i = 0; i < n + r; ++i) {
    if (i < n) {
      const double v = in[(i64)i * stride_in];
      while (tail > head && better(v, in[(i64)q[(size_t)(tail - 1)] * stride_in])) --tail;
      q[(size_t)tail++] = i;
    }
    const int center = i - r;
    if (center >= 0) {
      while (q[(size_t)head] < center - r) ++head;
      out[(i64)center * stride_out] = in[(i64)q[(size_t)head] * stride_in];
    }
  }
}

template <bool Max>
void morph(const double* src, int h, int w, int r, double* dst) {
  std::vector<double> tmp((size_t)h * w);
  par::for_n(h, [&](i64 y) { sliding_1d<Max>(src + y * w, 1, tmp.data() + y * w, 1, w, r); });
  par::for_n(w, [&](i64 x) { sliding_1d<Max>(tmp.data() + x, w, dst + x, w, h, r); });
}

}  // namespace

void erode(const double* src, int h, int w, int r, double* dst) { morph<false>(src, h, w, r, dst); }
void dilate(const double* src, int h, int w, int r, double* dst) { morph<true>(src, h, w, r, dst); }

// ---------------------------------------------------------------------------
// reference implementations
// ---------------------------------------------------------------------------

namespace ref {

void conv2d_forward(const Conv2dShape& s, const double* x, const double* wt,
                    const double* bias, double* y) {
  const int oh = s.out_h(), ow = s.out_w();
  for (int co = 0; co < s.cout; ++co)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double acc = bias ? bias[co] : 0.0;
        for (int ci = 0; ci < s.cin; ++ci)
          for (int ky = 0; ky < s.kh; ++ky)
            for (int kx = 0; kx < s.kw; ++kx) {
              const int iy = oy * s.stride - s.pad + ky;
              const int ix = ox * s.stride - s.pad + kx;
              if (iy < 0 || iy >= s.h || ix < 0 || ix >= s.w) continue;
              acc += x[idx3(ci, iy, ix, s.h, s.w)] *
                     wt[(((i64)co * s.cin + ci) * s.kh + ky) * s.kw + kx];
            }
        y[idx3(co, oy, ox, oh, ow)] = acc;
      }
}

void conv2d_grad_input(const Conv2dShape& s, const double* dy, const double* wt, double* dx) {
  const int oh = s.out_h(), ow = s.out_w();
  for (int ci = 0; ci < s.cin; ++ci)
    for (int iy = 0; iy < s.h; ++iy)
      for (int ix = 0; ix < s.w; ++ix) {
        double acc = 0.0;
        for (int co = 0; co < s.cout; ++co)
          for (int ky = 0; ky < s.kh; ++ky)
            for (int kx = 0; kx < s.kw; ++kx) {
              const int ny = iy + s.pad - ky, nx = ix + s.pad - kx;
              if (ny < 0 || nx < 0 || ny % s.stride || nx % s.stride) continue;
              const int oy = ny / s.stride, ox = nx / s.stride;
              if (oy >= oh || ox >= ow) continue;
              acc += dy[idx3(co, oy, ox, oh, ow)] *
                     wt[(((i64)co * s.cin + ci) * s.kh + ky) * s.kw + kx];
            }
        dx[idx3(ci, iy, ix, s.h, s.w)] = acc;
      }
}

void conv2d_grad_params(const Conv2dShape& s, const double* dy, const double* x, double* dw,
                        double* db) {
  const int oh = s.out_h(), ow = s.out_w();
  for (int co = 0; co < s.cout; ++co)
    for (int ci = 0; ci < s.cin; ++ci)
      for (int ky = 0; ky < s.kh; ++ky)
        for (int kx = 0; kx < s.kw; ++kx) {
          double acc = 0.0;
          for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
              const int iy = oy * s.stride - s.pad + ky;
              const int ix = ox * s.stride - s.pad + kx;
              if (iy < 0 || iy >= s.h || ix < 0 || ix >= s.w) continue;
              acc += dy[idx3(co, oy, ox, oh, ow)] * x[idx3(ci, iy, ix, s.h, s.w)];
            }
          dw[(((i64)co * s.cin + ci) * s.kh + ky) * s.kw + kx] = acc;
        }
  if (db)
    for (int co = 0; co < s.cout; ++co) {
      double acc = 0.0;
      for (i64 i = 0; i < (i64)oh * ow; ++i) acc += dy[(i64)co * oh * ow + i];
      db[co] = acc;
    }
}

void matmul(const double* a, const double* b, double* c, int m, int k, int n, bool ta, bool tb) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int l = 0; l < k; ++l) {
        const double av = ta ? a[(i64)l * m + i] : a[(i64)i * k + l];
        const double bv = tb ? b[(i64)j * k + l] : b[(i64)l * n + j];
        acc += av * bv;
      }
      c[(i64)i * n + j] = acc;
    }
}

void gaussian_blur(const double* src, int h, int w, double sigma, double* dst) {
  int radius;
  const auto k = gauss_taps(sigma, radius);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
          acc += k[(size_t)(dy + radius)] * k[(size_t)(dx + radius)] *
                 src[(i64)mirror(y + dy, h) * w + mirror(x + dx, w)];
      dst[(i64)y * w + x] = acc;
    }
}

template <bool Max>
static void morph_ref(const double* src, int h, int w, int r, double* dst) {
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double best = src[(i64)y * w + x];
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int iy = y + dy, ix = x + dx;
          if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
          const double v = src[(i64)iy * w + ix];
          best = Max ? std::max(best, v) : std::min(best, v);
        }
      dst[(i64)y * w + x] = best;
    }
}

void erode(const double* src, int h, int w, int r, double* dst) { morph_ref<false>(src, h, w, r, dst); }
void dilate(const double* src, int h, int w, int r, double* dst) { morph_ref<true>(src, h, w, r, dst); }

}  // namespace ref

}  // namespace ifsynth::kernels
