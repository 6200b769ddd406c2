#pragma once

#include "ifsynth/core/tensor.h"

namespace ifsynth::kernels {

// Layouts: x {Cin,H,W}, w {Cout,Cin,kh,kw}, y {Cout,Ho,Wo}, zero padding.
// Per-output-element accumulation order is fixed (ci, ky, kx) so the
// OpenMP versions are bit-identical to the serial reference in ref::.

struct Conv2dShape {
  int cin, h, w;
  int cout, kh, kw;
  int stride, pad;
  int out_h() const { return (h + 2 * pad - kh) / stride + 1; }
  int out_w() const { return (w + 2 * pad - kw) / stride + 1; }
};

void conv2d_forward(const Conv2dShape& s, const double* x, const double* wt,
                    const double* bias, double* y);
void conv2d_grad_input(const Conv2dShape& s, const double* dy, const double* wt, double* dx);
void conv2d_grad_params(const Conv2dShape& s, const double* dy, const double* x, double* dw,
                        double* db);

// c {m,n} = a' {m,k} * b' {k,n}; ta/tb transpose the stored operands.
void matmul(const double* a, const double* b, double* c, int m, int k, int n, bool ta, bool tb);

// Separable Gaussian, mirror borders, radius = ceil(3*sigma).
void gaussian_blur(const double* src, int h, int w, double sigma, double* dst);

// Area-weighted (box overlap) resampling.
void resize_area(const double* src, int sh, int sw, double* dst, int dh, int dw);

// Grayscale morphology with a square structuring element of Chebyshev
// radius r (van Herk sliding min/max).
void erode(const double* src, int h, int w, int r, double* dst);
void dilate(const double* src, int h, int w, int r, double* dst);

// Naive single-threaded reference implementations, kept for correctness
// tests and the kernel benchmark.
namespace ref {
void conv2d_forward(const Conv2dShape& s, const double* x, const double* wt,
                    const double* bias, double* y);
void conv2d_grad_input(const Conv2dShape& s, const double* dy, const double* wt, double* dx);
void conv2d_grad_params(const Conv2dShape& s, const double* dy, const double* x, double* dw,
                        double* db);
void matmul(const double* a, const double* b, double* c, int m, int k, int n, bool ta, bool tb);
void gaussian_blur(const double* src, int h, int w, double sigma, double* dst);
void erode(const double* src, int h, int w, int r, double* dst);
void dilate(const double* src, int h, int w, int r, double* dst);
}  // namespace ref

}  // namespace ifsynth::kernels
