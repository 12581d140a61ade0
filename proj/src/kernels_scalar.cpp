// Reference kernels. Portable, no intrinsics; the SIMD backends must match
// these bit-for-bit (see kernels.hpp for the arithmetic contract).

#include <cmath>
#include <cstring>

#include "hdiv/kernels.hpp"

namespace hdiv::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        acc[i & 3] = std::fma(a[i], b[i], acc[i & 3]);
    }
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sum_scalar(const double* a, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        acc[i & 3] += a[i];
    }
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sumsq_scalar(const double* a, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        acc[i & 3] = std::fma(a[i], a[i], acc[i & 3]);
    }
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc[i & 3] = std::fma(d, d, acc[i & 3]);
    }
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::fma(alpha, x[i], y[i]);
    }
}

void scale_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        x[i] *= alpha;
    }
}

void vadd_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a[i] + b[i];
    }
}

void vmul_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a[i] * b[i];
    }
}

void gemm_scalar(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n, bool accumulate) {
    if (!accumulate) {
        std::memset(c, 0, m * n * sizeof(double));
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            const double* brow = b + kk * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] = std::fma(av, brow[j], crow[j]);
            }
        }
    }
}

}  // namespace

namespace detail {
const KernelTable scalar_table = {
    dot_scalar,  sum_scalar,  sumsq_scalar, sqdist_scalar, axpy_scalar,
    scale_scalar, vadd_scalar, vmul_scalar,  gemm_scalar,
};
}  // namespace detail

}  // namespace hdiv::kernels
