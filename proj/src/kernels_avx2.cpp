#if defined(__x86_64__) || defined(_M_X64)

#include "jjr/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// Compiled with -mavx2 -mfma (see CMakeLists); callers must check
// cpu_has_avx2() before dispatching here.

namespace jjr::kernels::detail {

namespace {

constexpr int kMaxDim = 64;

// [re0,im0,re1,im1] lanes; two complex<double> per vector.
inline __m256d cmul(__m256d x, __m256d y) {
    const __m256d yr = _mm256_movedup_pd(y);
    const __m256d yi = _mm256_permute_pd(y, 0xF);
    const __m256d xs = _mm256_permute_pd(x, 0x5);
    return _mm256_fmaddsub_pd(x, yr, _mm256_mul_pd(xs, yi));
}

inline __m256d broadcast_c(Complex v) {
    return _mm256_setr_pd(v.real(), v.imag(), v.real(), v.imag());
}

// (x + iy) -> (y - ix): multiply by -i.
inline __m256d neg_i(__m256d v) {
    const __m256d swapped = _mm256_permute_pd(v, 0x5);
    const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
    return _mm256_mul_pd(swapped, sign);
}

inline Complex load_c(const Complex* p) { return *p; }

} // namespace

void axpy_avx2(std::size_t n, Complex alpha, const Complex* x, Complex* y) {
    const __m256d av = broadcast_c(alpha);
    std::size_t i = 0;
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul(av, xv)));
    }
    for (; i < n; ++i)
        y[i] += alpha * x[i];
}

double error_norm_avx2(std::size_t n, const Complex* err, const Complex* y0,
                       const Complex* y1, double atol, double rtol) {
    const std::size_t nd = 2 * n; // treat re/im as independent components
    const double* e = reinterpret_cast<const double*>(err);
    const double* a = reinterpret_cast<const double*>(y0);
    const double* b = reinterpret_cast<const double*>(y1);
    const __m256d atolv = _mm256_set1_pd(atol);
    const __m256d rtolv = _mm256_set1_pd(rtol);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= nd; i += 4) {
        const __m256d av = _mm256_and_pd(absmask, _mm256_loadu_pd(a + i));
        const __m256d bv = _mm256_and_pd(absmask, _mm256_loadu_pd(b + i));
        const __m256d w = _mm256_fmadd_pd(rtolv, _mm256_max_pd(av, bv), atolv);
        const __m256d q = _mm256_div_pd(_mm256_loadu_pd(e + i), w);
        acc = _mm256_fmadd_pd(q, q, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < nd; ++i) {
        const double w = atol + rtol * std::max(std::fabs(a[i]), std::fabs(b[i]));
        const double q = e[i] / w;
        sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(nd));
}

void lindblad_tridiag_rhs_avx2(int dim, const Complex* rho, Complex* out, const Complex* c,
                               const Complex* g, double kt) {
    if (dim > kMaxDim) {
        // out of the supported register-blocking range; fall back
        lindblad_tridiag_rhs_scalar(dim, rho, out, c, g, kt);
        return;
    }
    // column-indexed coefficient tables, zero-padded at the edges
    alignas(32) Complex cj[kMaxDim];
    alignas(32) Complex cc1[kMaxDim];
    alignas(32) Complex gc1[kMaxDim];
    alignas(32) double wj[2 * kMaxDim];
    cj[0] = Complex(0.0);
    for (int j = 1; j < dim; ++j) cj[j] = c[j];
    for (int j = 0; j < dim - 1; ++j) cc1[j] = std::conj(c[j + 1]);
    cc1[dim - 1] = Complex(0.0);
    for (int j = 0; j < dim - 1; ++j) gc1[j] = std::conj(g[j + 1]);
    gc1[dim - 1] = Complex(0.0);
    for (int j = 0; j < dim; ++j)
        wj[2 * j] = wj[2 * j + 1] = 0.5 * kt * static_cast<double>(j);

    const double* cjd = reinterpret_cast<const double*>(cj);
    const double* cc1d = reinterpret_cast<const double*>(cc1);
    const double* gc1d = reinterpret_cast<const double*>(gc1);

    for (int m = 0; m < dim; ++m) {
        const Complex* row = rho + static_cast<std::size_t>(m) * dim;
        const bool has_up = m + 1 < dim;
        const bool has_dn = m > 0;
        const Complex* rup = has_up ? row + dim : row; // unused when !has_up
        const Complex* rdn = has_dn ? row - dim : row;
        Complex* o = out + static_cast<std::size_t>(m) * dim;
        const Complex c_up = has_up ? c[m + 1] : Complex(0.0);
        const Complex c_dn = has_dn ? std::conj(c[m]) : Complex(0.0);
        const Complex g_up = has_up ? kt * g[m + 1] : Complex(0.0);
        const __m256d cupv = broadcast_c(c_up);
        const __m256d cdnv = broadcast_c(c_dn);
        const __m256d gupv = broadcast_c(g_up);
        const __m256d halfktm = _mm256_set1_pd(0.5 * kt * static_cast<double>(m));
        const double* rowd = reinterpret_cast<const double*>(row);
        const double* rupd = reinterpret_cast<const double*>(rup);
        const double* rdnd = reinterpret_cast<const double*>(rdn);
        double* od = reinterpret_cast<double*>(o);

        auto scalar_cell = [&](int j) {
            Complex h = 0.0;
            if (has_up) h += c_up * rup[j];
            if (has_dn) h += c_dn * rdn[j];
            if (j > 0) h -= row[j - 1] * cj[j];
            if (j + 1 < dim) h -= row[j + 1] * cc1[j];
            Complex acc = Complex(0.0, -1.0) * h;
            if (has_up && j + 1 < dim) acc += g_up * gc1[j] * rup[j + 1];
            acc -= (0.5 * kt * static_cast<double>(m + j)) * row[j];
            o[j] = acc;
        };

        scalar_cell(0);
        int j = 1;
        // vector body valid while both j and j+1 have left and right neighbours
        for (; j + 2 <= dim - 1; j += 2) {
            __m256d h = _mm256_setzero_pd();
            if (has_up) h = _mm256_add_pd(h, cmul(cupv, _mm256_loadu_pd(rupd + 2 * j)));
            if (has_dn) h = _mm256_add_pd(h, cmul(cdnv, _mm256_loadu_pd(rdnd + 2 * j)));
            h = _mm256_sub_pd(
                h, cmul(_mm256_loadu_pd(rowd + 2 * (j - 1)), _mm256_loadu_pd(cjd + 2 * j)));
            h = _mm256_sub_pd(
                h, cmul(_mm256_loadu_pd(rowd + 2 * (j + 1)), _mm256_loadu_pd(cc1d + 2 * j)));
            __m256d acc = neg_i(h);
            if (has_up) {
                const __m256d sandwich =
                    cmul(cmul(gupv, _mm256_loadu_pd(gc1d + 2 * j)),
                         _mm256_loadu_pd(rupd + 2 * (j + 1)));
                acc = _mm256_add_pd(acc, sandwich);
            }
            const __m256d w = _mm256_add_pd(_mm256_loadu_pd(wj + 2 * j), halfktm);
            acc = _mm256_fnmadd_pd(w, _mm256_loadu_pd(rowd + 2 * j), acc);
            _mm256_storeu_pd(od + 2 * j, acc);
        }
        for (; j < dim; ++j)
            scalar_cell(j);
    }
}

} // namespace jjr::kernels::detail

#endif // x86-64
