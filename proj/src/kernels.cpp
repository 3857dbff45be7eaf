#include "logdef/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace logdef::kernels {

namespace ref {

void guided_combine(const double* pos, const double* neg, double omega, double* out, int64_t n) {
    for (int64_t i = 0; i < n; ++i) {
        out[i] = pos[i] + omega * (pos[i] - neg[i]);
    }
}

void weighted_pair(const double* a, const double* b, double ca, double cb, double* out, int64_t n) {
    for (int64_t i = 0; i < n; ++i) {
        out[i] = ca * a[i] + cb * b[i];
    }
}

double max_abs_diff(const double* a, const double* b, int64_t n) {
    double m = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        m = std::max(m, std::fabs(a[i] - b[i]));
    }
    return m;
}

double max_abs(const double* a, int64_t n) {
    double m = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        m = std::max(m, std::fabs(a[i]));
    }
    return m;
}

void matmul(const double* A, const double* B, double* C, int64_t m, int64_t k, int64_t n) {
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int64_t p = 0; p < k; ++p) {
                acc += A[i * k + p] * B[p * n + j];
            }
            C[i * n + j] = acc;
        }
    }
}

static inline int64_t conv_out(int64_t extent, int64_t stride) { return (extent - 1) / stride + 1; }

static inline double conv_cell(const double* in, const double* w, const double* bias,
                               int64_t cin, int64_t h, int64_t wd,
                               int64_t co, int64_t oy, int64_t ox, int64_t stride) {
    double acc = bias ? bias[co] : 0.0;
    for (int64_t ci = 0; ci < cin; ++ci) {
        for (int64_t ky = 0; ky < 3; ++ky) {
            const int64_t iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= h) continue;
            for (int64_t kx = 0; kx < 3; ++kx) {
                const int64_t ix = ox * stride + kx - 1;
                if (ix < 0 || ix >= wd) continue;
                acc += in[(ci * h + iy) * wd + ix] * w[((co * cin + ci) * 3 + ky) * 3 + kx];
            }
        }
    }
    return acc;
}

void conv2d_3x3(const double* in, const double* w, const double* bias, double* out,
                int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride) {
    const int64_t ho = conv_out(h, stride), wo = conv_out(wd, stride);
    for (int64_t co = 0; co < cout; ++co) {
        for (int64_t oy = 0; oy < ho; ++oy) {
            for (int64_t ox = 0; ox < wo; ++ox) {
                out[(co * ho + oy) * wo + ox] = conv_cell(in, w, bias, cin, h, wd, co, oy, ox, stride);
            }
        }
    }
}

static inline double conv_grad_cell(const double* gout, const double* w,
                                    int64_t cin, int64_t h, int64_t wd, int64_t cout,
                                    int64_t ci, int64_t iy, int64_t ix, int64_t stride) {
    const int64_t ho = conv_out(h, stride), wo = conv_out(wd, stride);
    double acc = 0.0;
    for (int64_t co = 0; co < cout; ++co) {
        for (int64_t ky = 0; ky < 3; ++ky) {
            const int64_t ny = iy - ky + 1;
            if (ny < 0 || ny % stride != 0) continue;
            const int64_t oy = ny / stride;
            if (oy >= ho) continue;
            for (int64_t kx = 0; kx < 3; ++kx) {
                const int64_t nx = ix - kx + 1;
                if (nx < 0 || nx % stride != 0) continue;
                const int64_t ox = nx / stride;
                if (ox >= wo) continue;
                acc += gout[(co * ho + oy) * wo + ox] * w[((co * cin + ci) * 3 + ky) * 3 + kx];
            }
        }
    }
    return acc;
}

void conv2d_3x3_grad_input(const double* gout, const double* w, double* gin,
                           int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride) {
    for (int64_t ci = 0; ci < cin; ++ci) {
        for (int64_t iy = 0; iy < h; ++iy) {
            for (int64_t ix = 0; ix < wd; ++ix) {
                gin[(ci * h + iy) * wd + ix] = conv_grad_cell(gout, w, cin, h, wd, cout, ci, iy, ix, stride);
            }
        }
    }
}

static inline double row_pair_sum(const double* X, const double* Y, int64_t ny, int64_t d, int64_t i) {
    double acc = 0.0;
    for (int64_t j = 0; j < ny; ++j) {
        double sq = 0.0;
        for (int64_t c = 0; c < d; ++c) {
            const double dd = X[i * d + c] - Y[j * d + c];
            sq += dd * dd;
        }
        acc += std::sqrt(sq);
    }
    return acc;
}

double mean_pairwise_distance(const double* X, int64_t nx, const double* Y, int64_t ny, int64_t d) {
    std::vector<double> row(static_cast<size_t>(nx));
    for (int64_t i = 0; i < nx; ++i) {
        row[static_cast<size_t>(i)] = row_pair_sum(X, Y, ny, d, i);
    }
    double total = 0.0;
    for (int64_t i = 0; i < nx; ++i) total += row[static_cast<size_t>(i)];
    return total / (static_cast<double>(nx) * static_cast<double>(ny));
}

} // namespace ref

namespace par {

void guided_combine(const double* pos, const double* neg, double omega, double* out, int64_t n) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        out[i] = pos[i] + omega * (pos[i] - neg[i]);
    }
}

void weighted_pair(const double* a, const double* b, double ca, double cb, double* out, int64_t n) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        out[i] = ca * a[i] + cb * b[i];
    }
}

double max_abs_diff(const double* a, const double* b, int64_t n) {
    double m = 0.0;
    // max is exactly associative, so the reduction is order-insensitive.
#pragma omp parallel for schedule(static) reduction(max : m)
    for (int64_t i = 0; i < n; ++i) {
        m = std::max(m, std::fabs(a[i] - b[i]));
    }
    return m;
}

double max_abs(const double* a, int64_t n) {
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (int64_t i = 0; i < n; ++i) {
        m = std::max(m, std::fabs(a[i]));
    }
    return m;
}

void matmul(const double* A, const double* B, double* C, int64_t m, int64_t k, int64_t n) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int64_t p = 0; p < k; ++p) {
                acc += A[i * k + p] * B[p * n + j];
            }
            C[i * n + j] = acc;
        }
    }
}

void conv2d_3x3(const double* in, const double* w, const double* bias, double* out,
                int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride) {
    const int64_t ho = (h - 1) / stride + 1, wo = (wd - 1) / stride + 1;
#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t co = 0; co < cout; ++co) {
        for (int64_t oy = 0; oy < ho; ++oy) {
            for (int64_t ox = 0; ox < wo; ++ox) {
                out[(co * ho + oy) * wo + ox] = ref::conv_cell(in, w, bias, cin, h, wd, co, oy, ox, stride);
            }
        }
    }
}

void conv2d_3x3_grad_input(const double* gout, const double* w, double* gin,
                           int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t ci = 0; ci < cin; ++ci) {
        for (int64_t iy = 0; iy < h; ++iy) {
            for (int64_t ix = 0; ix < wd; ++ix) {
                gin[(ci * h + iy) * wd + ix] = ref::conv_grad_cell(gout, w, cin, h, wd, cout, ci, iy, ix, stride);
            }
        }
    }
}

double mean_pairwise_distance(const double* X, int64_t nx, const double* Y, int64_t ny, int64_t d) {
    std::vector<double> row(static_cast<size_t>(nx));
    // Per-row partial sums are computed in the reference inner order and
    // combined serially below, keeping the result thread-count independent.
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < nx; ++i) {
        row[static_cast<size_t>(i)] = ref::row_pair_sum(X, Y, ny, d, i);
    }
    double total = 0.0;
    for (int64_t i = 0; i < nx; ++i) total += row[static_cast<size_t>(i)];
    return total / (static_cast<double>(nx) * static_cast<double>(ny));
}

} // namespace par

namespace {
constexpr int64_t kParallelCutoff = 1 << 12;
}

void guided_combine(const double* pos, const double* neg, double omega, double* out, int64_t n) {
    if (n >= kParallelCutoff) par::guided_combine(pos, neg, omega, out, n);
    else ref::guided_combine(pos, neg, omega, out, n);
}

void weighted_pair(const double* a, const double* b, double ca, double cb, double* out, int64_t n) {
    if (n >= kParallelCutoff) par::weighted_pair(a, b, ca, cb, out, n);
    else ref::weighted_pair(a, b, ca, cb, out, n);
}

double max_abs_diff(const double* a, const double* b, int64_t n) {
    return n >= kParallelCutoff ? par::max_abs_diff(a, b, n) : ref::max_abs_diff(a, b, n);
}

double max_abs(const double* a, int64_t n) {
    return n >= kParallelCutoff ? par::max_abs(a, n) : ref::max_abs(a, n);
}

void matmul(const double* A, const double* B, double* C, int64_t m, int64_t k, int64_t n) {
    if (m * k * n >= kParallelCutoff) par::matmul(A, B, C, m, k, n);
    else ref::matmul(A, B, C, m, k, n);
}

void conv2d_3x3(const double* in, const double* w, const double* bias, double* out,
                int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride) {
    if (cin * h * wd * cout >= kParallelCutoff) par::conv2d_3x3(in, w, bias, out, cin, h, wd, cout, stride);
    else ref::conv2d_3x3(in, w, bias, out, cin, h, wd, cout, stride);
}

void conv2d_3x3_grad_input(const double* gout, const double* w, double* gin,
                           int64_t cin, int64_t h, int64_t wd, int64_t cout, int64_t stride) {
    if (cin * h * wd * cout >= kParallelCutoff) par::conv2d_3x3_grad_input(gout, w, gin, cin, h, wd, cout, stride);
    else ref::conv2d_3x3_grad_input(gout, w, gin, cin, h, wd, cout, stride);
}

double mean_pairwise_distance(const double* X, int64_t nx, const double* Y, int64_t ny, int64_t d) {
    if (nx * ny * d >= kParallelCutoff) return par::mean_pairwise_distance(X, nx, Y, ny, d);
    return ref::mean_pairwise_distance(X, nx, Y, ny, d);
}

} // namespace logdef::kernels
