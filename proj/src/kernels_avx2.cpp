// AVX2+FMA kernels. Bit-identical to the scalar reference: reductions keep
// the striped 4-lane accumulator layout (vector lane = index mod 4) and fold
// as (l0+l2)+(l1+l3), which is exactly what the 128-bit halves add produces;
// gemm accumulates every C element over k in ascending order with FMA.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "hdiv/kernels.hpp"

namespace hdiv::kernels {
namespace {

inline double fold4(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d q = _mm_add_pd(lo, hi);  // [l0+l2, l1+l3]
    return _mm_cvtsd_f64(q) + _mm_cvtsd_f64(_mm_unpackhi_pd(q, q));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    if (i == n) return fold4(acc);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (; i < n; ++i) {
        lanes[i & 3] = std::fma(a[i], b[i], lanes[i & 3]);
    }
    return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    }
    if (i == n) return fold4(acc);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (; i < n; ++i) {
        lanes[i & 3] += a[i];
    }
    return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

double sumsq_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(a + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    if (i == n) return fold4(acc);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (; i < n; ++i) {
        lanes[i & 3] = std::fma(a[i], a[i], lanes[i & 3]);
    }
    return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

double sqdist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    if (i == n) return fold4(acc);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        lanes[i & 3] = std::fma(d, d, lanes[i & 3]);
    }
    return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) {
        y[i] = std::fma(alpha, x[i], y[i]);
    }
}

void scale_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) {
        x[i] *= alpha;
    }
}

void vadd_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) {
        out[i] = a[i] + b[i];
    }
}

void vmul_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) {
        out[i] = a[i] * b[i];
    }
}

// Register-blocked 4x8 micro-kernel. C values live in registers across the
// whole k loop of a tile, so each element still sees one fma per k step in
// ascending k order.
void gemm_avx2(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate) {
    if (!accumulate) {
        std::memset(c, 0, m * n * sizeof(double));
    }
    constexpr std::size_t MR = 4;
    constexpr std::size_t NR = 8;
    const std::size_t m_main = m - m % MR;
    const std::size_t n_main = n - n % NR;

    for (std::size_t i0 = 0; i0 < m_main; i0 += MR) {
        const double* a0 = a + (i0 + 0) * k;
        const double* a1 = a + (i0 + 1) * k;
        const double* a2 = a + (i0 + 2) * k;
        const double* a3 = a + (i0 + 3) * k;
        for (std::size_t j0 = 0; j0 < n_main; j0 += NR) {
            double* c0 = c + (i0 + 0) * n + j0;
            double* c1 = c + (i0 + 1) * n + j0;
            double* c2 = c + (i0 + 2) * n + j0;
            double* c3 = c + (i0 + 3) * n + j0;
            __m256d r00 = _mm256_loadu_pd(c0), r01 = _mm256_loadu_pd(c0 + 4);
            __m256d r10 = _mm256_loadu_pd(c1), r11 = _mm256_loadu_pd(c1 + 4);
            __m256d r20 = _mm256_loadu_pd(c2), r21 = _mm256_loadu_pd(c2 + 4);
            __m256d r30 = _mm256_loadu_pd(c3), r31 = _mm256_loadu_pd(c3 + 4);
            const double* bp = b + j0;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                const __m256d b0 = _mm256_loadu_pd(bp);
                const __m256d b1 = _mm256_loadu_pd(bp + 4);
                __m256d av;
                av = _mm256_set1_pd(a0[kk]);
                r00 = _mm256_fmadd_pd(av, b0, r00);
                r01 = _mm256_fmadd_pd(av, b1, r01);
                av = _mm256_set1_pd(a1[kk]);
                r10 = _mm256_fmadd_pd(av, b0, r10);
                r11 = _mm256_fmadd_pd(av, b1, r11);
                av = _mm256_set1_pd(a2[kk]);
                r20 = _mm256_fmadd_pd(av, b0, r20);
                r21 = _mm256_fmadd_pd(av, b1, r21);
                av = _mm256_set1_pd(a3[kk]);
                r30 = _mm256_fmadd_pd(av, b0, r30);
                r31 = _mm256_fmadd_pd(av, b1, r31);
            }
            _mm256_storeu_pd(c0, r00);
            _mm256_storeu_pd(c0 + 4, r01);
            _mm256_storeu_pd(c1, r10);
            _mm256_storeu_pd(c1 + 4, r11);
            _mm256_storeu_pd(c2, r20);
            _mm256_storeu_pd(c2 + 4, r21);
            _mm256_storeu_pd(c3, r30);
            _mm256_storeu_pd(c3 + 4, r31);
        }
        // column remainder, 4-wide then scalar
        std::size_t j0 = n_main;
        for (; j0 + 4 <= n; j0 += 4) {
            __m256d r0 = _mm256_loadu_pd(c + (i0 + 0) * n + j0);
            __m256d r1 = _mm256_loadu_pd(c + (i0 + 1) * n + j0);
            __m256d r2 = _mm256_loadu_pd(c + (i0 + 2) * n + j0);
            __m256d r3 = _mm256_loadu_pd(c + (i0 + 3) * n + j0);
            const double* bp = b + j0;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                const __m256d bv = _mm256_loadu_pd(bp);
                r0 = _mm256_fmadd_pd(_mm256_set1_pd(a0[kk]), bv, r0);
                r1 = _mm256_fmadd_pd(_mm256_set1_pd(a1[kk]), bv, r1);
                r2 = _mm256_fmadd_pd(_mm256_set1_pd(a2[kk]), bv, r2);
                r3 = _mm256_fmadd_pd(_mm256_set1_pd(a3[kk]), bv, r3);
            }
            _mm256_storeu_pd(c + (i0 + 0) * n + j0, r0);
            _mm256_storeu_pd(c + (i0 + 1) * n + j0, r1);
            _mm256_storeu_pd(c + (i0 + 2) * n + j0, r2);
            _mm256_storeu_pd(c + (i0 + 3) * n + j0, r3);
        }
        for (; j0 < n; ++j0) {
            for (std::size_t r = 0; r < MR; ++r) {
                const double* ar = a + (i0 + r) * k;
                double acc = c[(i0 + r) * n + j0];
                for (std::size_t kk = 0; kk < k; ++kk) {
                    acc = std::fma(ar[kk], b[kk * n + j0], acc);
                }
                c[(i0 + r) * n + j0] = acc;
            }
        }
    }
    // row remainder
    for (std::size_t i = m_main; i < m; ++i) {
        const double* ar = a + i * k;
        double* cr = c + i * n;
        std::size_t j0 = 0;
        for (; j0 + 4 <= n; j0 += 4) {
            __m256d r0 = _mm256_loadu_pd(cr + j0);
            const double* bp = b + j0;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                r0 = _mm256_fmadd_pd(_mm256_set1_pd(ar[kk]), _mm256_loadu_pd(bp), r0);
            }
            _mm256_storeu_pd(cr + j0, r0);
        }
        for (; j0 < n; ++j0) {
            double acc = cr[j0];
            for (std::size_t kk = 0; kk < k; ++kk) {
                acc = std::fma(ar[kk], b[kk * n + j0], acc);
            }
            cr[j0] = acc;
        }
    }
}

}  // namespace

namespace detail {
const KernelTable avx2_table = {
    dot_avx2,  sum_avx2,  sumsq_avx2, sqdist_avx2, axpy_avx2,
    scale_avx2, vadd_avx2, vmul_avx2,  gemm_avx2,
};
}  // namespace detail

}  // namespace hdiv::kernels

#endif  // x86_64
