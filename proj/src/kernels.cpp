#include "jjr/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace jjr::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend select_backend() {
    if (const char* env = std::getenv("JJR_KERNEL_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
        return Backend::scalar;
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

const Backend g_backend = select_backend();

} // namespace

Backend active_backend() { return g_backend; }

const char* backend_name() {
    return g_backend == Backend::avx2 ? "avx2" : "scalar";
}

void axpy(std::size_t n, Complex alpha, const Complex* x, Complex* y) {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend == Backend::avx2) {
        detail::axpy_avx2(n, alpha, x, y);
        return;
    }
#endif
    detail::axpy_scalar(n, alpha, x, y);
}

double error_norm(std::size_t n, const Complex* err, const Complex* y0, const Complex* y1,
                  double atol, double rtol) {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend == Backend::avx2)
        return detail::error_norm_avx2(n, err, y0, y1, atol, rtol);
#endif
    return detail::error_norm_scalar(n, err, y0, y1, atol, rtol);
}

void lindblad_tridiag_rhs(int dim, const Complex* rho, Complex* out, const Complex* c,
                          const Complex* g, double kt) {
#if defined(__x86_64__) || defined(_M_X64)
    if (g_backend == Backend::avx2) {
        detail::lindblad_tridiag_rhs_avx2(dim, rho, out, c, g, kt);
        return;
    }
#endif
    detail::lindblad_tridiag_rhs_scalar(dim, rho, out, c, g, kt);
}

} // namespace jjr::kernels
