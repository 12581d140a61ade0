#pragma once

// Low-level f64 kernels with runtime-dispatched SIMD variants.
//
// Every backend implements the same arithmetic contract so results are
// bit-identical regardless of which one is active:
//   - reductions (dot/sum/sumsq/sqdist) accumulate into four interleaved
//     lanes (lane = index mod 4) and fold as (l0+l2) + (l1+l3);
//   - gemm accumulates each output element over k in ascending order with
//     fused multiply-add;
//   - elementwise ops are per-element and order-free.
// Equivalence tests assert exact equality between backends.

#include <cstddef>
#include <string>
#include <vector>

namespace hdiv::kernels {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);
std::vector<Backend> supported_backends();
Backend active_backend();
// Returns false (and leaves the active backend unchanged) if `b` is not
// supported on this CPU.
bool set_backend(Backend b);
// Honors HDIV_KERNELS=scalar|avx2|neon|auto; called once on first use.
void init_from_env();

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);

void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void vadd(const double* a, const double* b, double* out, std::size_t n);
void vmul(const double* a, const double* b, double* out, std::size_t n);

// C[MxN] = A[MxK] * B[KxN] (row-major); adds into C when accumulate is set.
void gemm(const double* a, const double* b, double* c, std::size_t m,
          std::size_t k, std::size_t n, bool accumulate);

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sqdist)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*vadd)(const double*, const double*, double*, std::size_t);
    void (*vmul)(const double*, const double*, double*, std::size_t);
    void (*gemm)(const double*, const double*, double*, std::size_t,
                 std::size_t, std::size_t, bool);
};

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
#if defined(__aarch64__)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace hdiv::kernels
