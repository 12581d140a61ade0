// NEON kernels (aarch64). Two float64x2 registers emulate the 4-lane stripe
// of the reference backend; vaddq of the two accumulators followed by a
// pairwise lane add reproduces the (l0+l2)+(l1+l3) fold exactly.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstring>

#include "hdiv/kernels.hpp"

namespace hdiv::kernels {
namespace {

inline double fold4(float64x2_t acc01, float64x2_t acc23) {
    const float64x2_t q = vaddq_f64(acc01, acc23);  // [l0+l2, l1+l3]
    return vgetq_lane_f64(q, 0) + vgetq_lane_f64(q, 1);
}

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc01 = vfmaq_f64(acc01, vld1q_f64(a + i), vld1q_f64(b + i));
        acc23 = vfmaq_f64(acc23, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    if (i == n) return fold4(acc01, acc23);
    double lanes[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                       vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (; i < n; ++i) {
        lanes[i & 3] = std::fma(a[i], b[i], lanes[i & 3]);
    }
    return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

double sum_neon(const double* a, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc01 = vaddq_f64(acc01, vld1q_f64(a + i));
        acc23 = vaddq_f64(acc23, vld1q_f64(a + i + 2));
    }
    if (i == n) return fold4(acc01, acc23);
    double lanes[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                       vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (; i < n; ++i) {
        lanes[i & 3] += a[i];
    }
    return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

double sumsq_neon(const double* a, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t v01 = vld1q_f64(a + i);
        const float64x2_t v23 = vld1q_f64(a + i + 2);
        acc01 = vfmaq_f64(acc01, v01, v01);
        acc23 = vfmaq_f64(acc23, v23, v23);
    }
    if (i == n) return fold4(acc01, acc23);
    double lanes[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                       vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (; i < n; ++i) {
        lanes[i & 3] = std::fma(a[i], a[i], lanes[i & 3]);
    }
    return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

double sqdist_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d01 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d23 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc01 = vfmaq_f64(acc01, d01, d01);
        acc23 = vfmaq_f64(acc23, d23, d23);
    }
    if (i == n) return fold4(acc01, acc23);
    double lanes[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                       vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        lanes[i & 3] = std::fma(d, d, lanes[i & 3]);
    }
    return (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) {
        y[i] = std::fma(alpha, x[i], y[i]);
    }
}

void scale_neon(double alpha, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) {
        x[i] *= alpha;
    }
}

void vadd_neon(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    for (; i < n; ++i) {
        out[i] = a[i] + b[i];
    }
}

void vmul_neon(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    for (; i < n; ++i) {
        out[i] = a[i] * b[i];
    }
}

// 4x4 register tile; same per-element ascending-k fma order as the reference.
void gemm_neon(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n, bool accumulate) {
    if (!accumulate) {
        std::memset(c, 0, m * n * sizeof(double));
    }
    constexpr std::size_t MR = 4;
    constexpr std::size_t NR = 4;
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
            float64x2_t r00 = vld1q_f64(c0), r01 = vld1q_f64(c0 + 2);
            float64x2_t r10 = vld1q_f64(c1), r11 = vld1q_f64(c1 + 2);
            float64x2_t r20 = vld1q_f64(c2), r21 = vld1q_f64(c2 + 2);
            float64x2_t r30 = vld1q_f64(c3), r31 = vld1q_f64(c3 + 2);
            const double* bp = b + j0;
            for (std::size_t kk = 0; kk < k; ++kk, bp += n) {
                const float64x2_t b0 = vld1q_f64(bp);
                const float64x2_t b1 = vld1q_f64(bp + 2);
                float64x2_t av;
                av = vdupq_n_f64(a0[kk]);
                r00 = vfmaq_f64(r00, av, b0);
                r01 = vfmaq_f64(r01, av, b1);
                av = vdupq_n_f64(a1[kk]);
                r10 = vfmaq_f64(r10, av, b0);
                r11 = vfmaq_f64(r11, av, b1);
                av = vdupq_n_f64(a2[kk]);
                r20 = vfmaq_f64(r20, av, b0);
                r21 = vfmaq_f64(r21, av, b1);
                av = vdupq_n_f64(a3[kk]);
                r30 = vfmaq_f64(r30, av, b0);
                r31 = vfmaq_f64(r31, av, b1);
            }
            vst1q_f64(c0, r00);
            vst1q_f64(c0 + 2, r01);
            vst1q_f64(c1, r10);
            vst1q_f64(c1 + 2, r11);
            vst1q_f64(c2, r20);
            vst1q_f64(c2 + 2, r21);
            vst1q_f64(c3, r30);
            vst1q_f64(c3 + 2, r31);
        }
        for (std::size_t j0 = n_main; j0 < n; ++j0) {
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
    for (std::size_t i = m_main; i < m; ++i) {
        const double* ar = a + i * k;
        double* cr = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            double acc = cr[j];
            for (std::size_t kk = 0; kk < k; ++kk) {
                acc = std::fma(ar[kk], b[kk * n + j], acc);
            }
            cr[j] = acc;
        }
    }
}

}  // namespace

namespace detail {
const KernelTable neon_table = {
    dot_neon,  sum_neon,  sumsq_neon, sqdist_neon, axpy_neon,
    scale_neon, vadd_neon, vmul_neon,  gemm_neon,
};
}  // namespace detail

}  // namespace hdiv::kernels

#endif  // __aarch64__
