#include "jjr/kernels.hpp"

#include <cmath>

namespace jjr::kernels::detail {

void axpy_scalar(std::size_t n, Complex alpha, const Complex* x, Complex* y) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += alpha * x[i];
}

double error_norm_scalar(std::size_t n, const Complex* err, const Complex* y0,
                         const Complex* y1, double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wr =
            atol + rtol * std::max(std::fabs(y0[i].real()), std::fabs(y1[i].real()));
        const double wi =
            atol + rtol * std::max(std::fabs(y0[i].imag()), std::fabs(y1[i].imag()));
        const double er = err[i].real() / wr;
        const double ei = err[i].imag() / wi;
        acc += er * er + ei * ei;
    }
    return std::sqrt(acc / static_cast<double>(2 * n));
}

void lindblad_tridiag_rhs_scalar(int dim, const Complex* rho, Complex* out, const Complex* c,
                                 const Complex* g, double kt) {
    const Complex mi(0.0, -1.0);
    for (int m = 0; m < dim; ++m) {
        const Complex* row = rho + static_cast<std::size_t>(m) * dim;
        const Complex* rup = m + 1 < dim ? row + dim : nullptr;  // rho row m+1
        const Complex* rdn = m > 0 ? row - dim : nullptr;        // rho row m-1
        Complex* o = out + static_cast<std::size_t>(m) * dim;
        const Complex c_up = m + 1 < dim ? c[m + 1] : Complex(0.0);
        const Complex c_dn = m > 0 ? std::conj(c[m]) : Complex(0.0);
        const Complex g_up = m + 1 < dim ? kt * g[m + 1] : Complex(0.0);
        for (int j = 0; j < dim; ++j) {
            Complex h = 0.0;
            if (rup) h += c_up * rup[j];
            if (rdn) h += c_dn * rdn[j];
            if (j > 0) h -= row[j - 1] * c[j];
            if (j + 1 < dim) h -= row[j + 1] * std::conj(c[j + 1]);
            Complex acc = mi * h;
            if (rup && j + 1 < dim) acc += g_up * std::conj(g[j + 1]) * rup[j + 1];
            acc -= (0.5 * kt * static_cast<double>(m + j)) * row[j];
            o[j] = acc;
        }
    }
}

} // namespace jjr::kernels::detail
