#include "hdiv/kernels.hpp"

#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>

namespace hdiv::kernels {
namespace {

const KernelTable* g_table = &detail::scalar_table;
Backend g_backend = Backend::scalar;
std::once_flag g_init_once;

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &detail::scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2:
            return &detail::avx2_table;
#endif
#if defined(__aarch64__)
        case Backend::neon:
            return &detail::neon_table;
#endif
        default:
            return nullptr;
    }
}

Backend best_backend() {
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    if (backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

void do_init() {
    Backend pick = best_backend();
    if (const char* env = std::getenv("HDIV_KERNELS")) {
        const std::string v(env);
        if (v == "scalar") {
            pick = Backend::scalar;
        } else if (v == "avx2" && backend_supported(Backend::avx2)) {
            pick = Backend::avx2;
        } else if (v == "neon" && backend_supported(Backend::neon)) {
            pick = Backend::neon;
        }  // "auto" or unsupported request: keep the probed default
    }
    g_backend = pick;
    g_table = table_for(pick);
}

inline const KernelTable& tab() {
    std::call_once(g_init_once, do_init);
    return *g_table;
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "?";
}

std::vector<Backend> supported_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
        if (backend_supported(b)) out.push_back(b);
    }
    return out;
}

Backend active_backend() {
    std::call_once(g_init_once, do_init);
    return g_backend;
}

bool set_backend(Backend b) {
    std::call_once(g_init_once, do_init);
    if (!backend_supported(b)) return false;
    const KernelTable* t = table_for(b);
    if (t == nullptr) return false;
    g_backend = b;
    g_table = t;
    return true;
}

void init_from_env() { std::call_once(g_init_once, do_init); }

double dot(const double* a, const double* b, std::size_t n) { return tab().dot(a, b, n); }
double sum(const double* a, std::size_t n) { return tab().sum(a, n); }
double sumsq(const double* a, std::size_t n) { return tab().sumsq(a, n); }
double sqdist(const double* a, const double* b, std::size_t n) { return tab().sqdist(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { tab().axpy(alpha, x, y, n); }
void scale(double alpha, double* x, std::size_t n) { tab().scale(alpha, x, n); }
void vadd(const double* a, const double* b, double* out, std::size_t n) { tab().vadd(a, b, out, n); }
void vmul(const double* a, const double* b, double* out, std::size_t n) { tab().vmul(a, b, out, n); }
void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
          std::size_t n, bool accumulate) {
    tab().gemm(a, b, c, m, k, n, accumulate);
}

}  // namespace hdiv::kernels
