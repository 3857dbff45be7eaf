#pragma once

#include <cstdint>

namespace logdef::kernels {

// Hot inner loops, each in two variants: a serial reference (ref) and an
// OpenMP version (par). The parallel variants compute every output element
// with the same per-element expression and inner loop order as the
// reference, so results are bit-identical regardless of thread count.
// Public entry points dispatch on problem size.

namespace ref {

// out[i] = pos[i] + omega * (pos[i] - neg[i])
void guided_combine(const double* pos, const double* neg, double omega, double* out, int64_t n);

// out[i] = ca * a[i] + cb * b[i]
void weighted_pair(const double* a, const double* b, double ca, double cb, double* out, int64_t n);

double max_abs_diff(const double* a, const double* b, int64_t n);
double max_abs(const double* a, int64_t n);

// C[m x n] = A[m x k] * B[k x n], row-major
void matmul(const double* A, const double* B, double* C, int64_t m, int64_t k, int64_t n);

// 3x3 convolution, padding 1, stride 1 or 2.
// in [Cin, H, W], w [Cout, Cin, 3, 3], bias [Cout] (may be null), out [Cout, Ho, Wo]
void conv2d_3x3(const double* in, const double* w, const double* bias, double* out,
                int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride);

// Gradient of conv2d_3x3 w.r.t. its input.
void conv2d_3x3_grad_input(const double* gout, const double* w, double* gin,
                           int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride);

// Mean pairwise Euclidean distance between rows of X [nx x d] and Y [ny x d].
double mean_pairwise_distance(const double* X, int64_t nx, const double* Y, int64_t ny, int64_t d);

} // namespace ref

namespace par {

void guided_combine(const double* pos, const double* neg, double omega, double* out, int64_t n);
void weighted_pair(const double* a, const double* b, double ca, double cb, double* out, int64_t n);
double max_abs_diff(const double* a, const double* b, int64_t n);
double max_abs(const double* a, int64_t n);
void matmul(const double* A, const double* B, double* C, int64_t m, int64_t k, int64_t n);
void conv2d_3x3(const double* in, const double* w, const double* bias, double* out,
                int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride);
void conv2d_3x3_grad_input(const double* gout, const double* w, double* gin,
                           int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride);
double mean_pairwise_distance(const double* X, int64_t nx, const double* Y, int64_t ny, int64_t d);

} // namespace par

// Size-dispatched entry points used by the rest of the library.
void guided_combine(const double* pos, const double* neg, double omega, double* out, int64_t n);
void weighted_pair(const double* a, const double* b, double ca, double cb, double* out, int64_t n);
double max_abs_diff(const double* a, const double* b, int64_t n);
double max_abs(const double* a, int64_t n);
void matmul(const double* A, const double* B, double* C, int64_t m, int64_t k, int64_t n);
void conv2d_3x3(const double* in, const double* w, const double* bias, double* out,
                int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride);
void conv2d_3x3_grad_input(const double* gout, const double* w, double* gin,
                           int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride);
double mean_pairwise_distance(const double* X, int64_t nx, const double* Y, int64_t ny, int64_t d);

} // namespace logdef::kernels
