#pragma once

// Adaptive Dormand-Prince 5(4) with FSAL and 4th-order dense output,
// operating on flat complex state vectors through the kernel layer.
// Internal to the dynamics module.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "jjr/errors.hpp"
#include "jjr/kernels.hpp"

namespace jjr::detail {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

struct Dopri5Options {
    double tol = 1e-8;
    double h_init = 1e-3;
    double h_min = 1e-12;
    std::size_t max_steps = 200'000'000;
};

// rhs(t, y.data(), out.data()); on_sample(t, y_interp.data()) at each
// requested time. sample_times must be ascending and lie in [t0, t1].
template <class Rhs, class SampleFn>
void dopri5_integrate(Rhs&& rhs, CVec& y, double t0, double t1,
                      const std::vector<double>& sample_times, SampleFn&& on_sample,
                      const Dopri5Options& opt) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0,
                            d7 = 69997945.0 / 29380423.0;

    const std::size_t n = y.size();
    CVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    CVec r2(n), r3(n), r4(n), r5(n), yint(n);

    auto build = [&](CVec& dst, const CVec& base, std::initializer_list<std::pair<double, const CVec*>> terms,
                     double h) {
        std::copy(base.begin(), base.end(), dst.begin());
        for (const auto& [coef, kv] : terms)
            kernels::axpy(n, Complex(h * coef, 0.0), kv->data(), dst.data());
    };

    double t = t0;
    double h = std::min(opt.h_init, (t1 - t0));
    if (h <= 0.0) h = opt.h_init;
    std::size_t next_sample = 0;
    while (next_sample < sample_times.size() && sample_times[next_sample] < t0 - 1e-12)
        ++next_sample;

    // t0 itself may be a sample point
    rhs(t, y.data(), k1.data());
    while (next_sample < sample_times.size() &&
           sample_times[next_sample] <= t0 + 1e-12) {
        on_sample(sample_times[next_sample], y.data());
        ++next_sample;
    }

    std::size_t steps = 0;
    while (t < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
        if (++steps > opt.max_steps)
            throw SolverError("time evolution: step budget exceeded");
        h = std::min(h, t1 - t);

        build(ytmp, y, {{a21, &k1}}, h);
        rhs(t + c2 * h, ytmp.data(), k2.data());
        build(ytmp, y, {{a31, &k1}, {a32, &k2}}, h);
        rhs(t + c3 * h, ytmp.data(), k3.data());
        build(ytmp, y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h);
        rhs(t + c4 * h, ytmp.data(), k4.data());
        build(ytmp, y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h);
        rhs(t + c5 * h, ytmp.data(), k5.data());
        build(ytmp, y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h);
        rhs(t + h, ytmp.data(), k6.data());
        build(ynew, y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
        rhs(t + h, ynew.data(), k7.data());

        std::fill(err.begin(), err.end(), Complex(0.0));
        kernels::axpy(n, Complex(h * e1, 0.0), k1.data(), err.data());
        kernels::axpy(n, Complex(h * e3, 0.0), k3.data(), err.data());
        kernels::axpy(n, Complex(h * e4, 0.0), k4.data(), err.data());
        kernels::axpy(n, Complex(h * e5, 0.0), k5.data(), err.data());
        kernels::axpy(n, Complex(h * e6, 0.0), k6.data(), err.data());
        kernels::axpy(n, Complex(h * e7, 0.0), k7.data(), err.data());
        const double enorm =
            kernels::error_norm(n, err.data(), y.data(), ynew.data(), opt.tol, opt.tol);

        if (enorm <= 1.0) {
            // dense output for samples inside (t, t+h]
            const bool need_dense = next_sample < sample_times.size() &&
                                    sample_times[next_sample] <= t + h + 1e-12;
            if (need_dense) {
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex diff = ynew[i] - y[i];
                    r2[i] = diff;
                    r3[i] = h * k1[i] - diff;
                    r4[i] = diff - h * k7[i] - r3[i];
                }
                std::fill(r5.begin(), r5.end(), Complex(0.0));
                kernels::axpy(n, Complex(h * d1, 0.0), k1.data(), r5.data());
                kernels::axpy(n, Complex(h * d3, 0.0), k3.data(), r5.data());
                kernels::axpy(n, Complex(h * d4, 0.0), k4.data(), r5.data());
                kernels::axpy(n, Complex(h * d5, 0.0), k5.data(), r5.data());
                kernels::axpy(n, Complex(h * d6, 0.0), k6.data(), r5.data());
                kernels::axpy(n, Complex(h * d7, 0.0), k7.data(), r5.data());
                while (next_sample < sample_times.size() &&
                       sample_times[next_sample] <= t + h + 1e-12) {
                    const double ts = sample_times[next_sample];
                    const double th = std::clamp((ts - t) / h, 0.0, 1.0);
                    const double om = 1.0 - th;
                    for (std::size_t i = 0; i < n; ++i)
                        yint[i] = y[i] + th * (r2[i] + om * (r3[i] + th * (r4[i] + om * r5[i])));
                    on_sample(ts, yint.data());
                    ++next_sample;
                }
            }
            t += h;
            std::swap(y, ynew);
            std::swap(k1, k7); // FSAL
            const double fac = std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            h *= std::max(0.1, 0.9 * std::pow(enorm, -0.2));
        }
        if (h < opt.h_min)
            throw SolverError("time evolution: step size underflow (stiffness)");
    }
}

} // namespace jjr::detail
