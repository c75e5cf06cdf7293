#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace jjr::kernels {

using Complex = std::complex<double>;

// Hot inner loops of the time-domain solver. Each kernel has a scalar
// reference implementation and, on x86-64 with AVX2+FMA, a vectorized
// variant selected once at startup. The active backend can be forced with
// the environment variable JJR_KERNEL_BACKEND=scalar|avx2 (checked before
// the first dispatch). Both variants are equivalence-tested against each
// other; results may differ by FMA rounding only.

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();
bool cpu_has_avx2();

/// y += alpha * x, n complex elements.
void axpy(std::size_t n, Complex alpha, const Complex* x, Complex* y);

/// Weighted RMS error norm used by the adaptive integrator:
/// sqrt(mean_i(|err_i|^2 / w_i^2)) with w_i = atol + rtol*max(|y0_i|,|y1_i|),
/// magnitudes taken per real component.
double error_norm(std::size_t n, const Complex* err, const Complex* y0, const Complex* y1,
                  double atol, double rtol);

/// Lindblad right-hand side for a tridiagonal Hamiltonian and a single
/// lowering-type collapse channel, the form every driven-Kerr evolution in
/// this project reduces to after the diagonal interaction-picture rotation:
///
///   out = -i (H rho - rho H) + kt * (g rho g^+  - 1/2 {g^+ g, rho})
///   H    = sum_k c[k] |k-1><k| + conj(c[k]) |k><k-1|
///   g    = sum_k g[k] |k-1><k|,   |g[k]| = sqrt(k)  (so g^+ g = diag(n))
///
/// rho and out are row-major dim x dim complex arrays; c and g are read at
/// indices 1..dim-1.
void lindblad_tridiag_rhs(int dim, const Complex* rho, Complex* out, const Complex* c,
                          const Complex* g, double kt);

namespace detail {
// Reference implementations, exposed for the cross-backend tests.
void axpy_scalar(std::size_t n, Complex alpha, const Complex* x, Complex* y);
double error_norm_scalar(std::size_t n, const Complex* err, const Complex* y0,
                         const Complex* y1, double atol, double rtol);
void lindblad_tridiag_rhs_scalar(int dim, const Complex* rho, Complex* out, const Complex* c,
                                 const Complex* g, double kt);
#if defined(__x86_64__) || defined(_M_X64)
void axpy_avx2(std::size_t n, Complex alpha, const Complex* x, Complex* y);
double error_norm_avx2(std::size_t n, const Complex* err, const Complex* y0,
                       const Complex* y1, double atol, double rtol);
void lindblad_tridiag_rhs_avx2(int dim, const Complex* rho, Complex* out, const Complex* c,
                               const Complex* g, double kt);
#endif
} // namespace detail

} // namespace jjr::kernels
