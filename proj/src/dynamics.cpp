#include "jjr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "jjr/kernels.hpp"
#include "jjr/spectrum.hpp"
#include "dopri5.hpp"

namespace jjr {

void DriveSpec::validate() const {
    if (tones.empty() || tones.size() > 2)
        throw ConfigError("DriveSpec: need one or two tones");
    for (const Tone& t : tones) {
        if (!(t.f_GHz > 0.0))
            throw ConfigError("DriveSpec: tone frequency must be > 0");
        if (t.power_aW < 0.0)
            throw ConfigError("DriveSpec: tone power must be >= 0");
    }
    if (tones.size() == 2 && !allow_equal_frequencies &&
        tones[0].f_GHz == tones[1].f_GHz)
        throw ConfigError("DriveSpec: two-tone frequencies must differ "
                          "(set the same-frequency flag to override)");
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                             Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw SolverError("DensityMatrix: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
    if (hermiticity_defect() > 1e-10 * std::max(1.0, rho.norm()))
        throw SolverError("DensityMatrix: hermiticity defect above 1e-10");
    if (trace_defect() > 1e-8)
        throw SolverError("DensityMatrix: trace deviates from 1 by more than 1e-8");
    if (min_eigenvalue() < -1e-8)
        throw SolverError("DensityMatrix: negative eigenvalue below -1e-8");
}

std::vector<Matrix> collapse_operators(const CircuitParams& p, int fock_dim) {
    if (fock_dim < 3)
        throw ConfigError("collapse_operators: fock_dim must be >= 3");
    const auto [a, ad] = ladder_operators(fock_dim);
    (void)ad;
    // symmetric design: kappa_L = kappa_R = kappa_c
    const double kl = p.kappa_c_ang();
    const double kr = p.kappa_c_ang();
    const double ki = p.kappa_i_ang();
    return {std::sqrt(kl) * a.entries, std::sqrt(kr) * a.entries,
            std::sqrt(ki) * a.entries};
}

double drive_amplitude(double power_aW, double f_GHz, double kappa_c_MHz) {
    if (power_aW < 0.0)
        throw ConfigError("drive_amplitude: power must be >= 0");
    return std::sqrt(angular_from_MHz(kappa_c_MHz) * photon_flux_per_ns(power_aW, f_GHz));
}

QuantumOperatorMatrix rotating_frame_hamiltonian(const QuantumOperatorMatrix& h_kerr_GHz,
                                                 const DriveSpec& drive, double eps_ang) {
    drive.validate();
    if (drive.tones.size() != 1)
        throw ConfigError("rotating_frame_hamiltonian: single tone only; "
                          "two-tone drives need time evolution");
    if (h_kerr_GHz.basis_tag != Basis::fock)
        throw SolverError("rotating_frame_hamiltonian: expects a Fock-basis Hamiltonian");
    const int dim = h_kerr_GHz.dim();
    const double fd = drive.tones[0].f_GHz;
    Matrix h = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n)
        h(n, n) = angular_from_GHz(h_kerr_GHz.entries(n, n).real() - fd * n);
    for (int n = 1; n < dim; ++n) {
        const double s = eps_ang * std::sqrt(static_cast<double>(n));
        h(n - 1, n) += s;
        h(n, n - 1) += s;
    }
    return QuantumOperatorMatrix(std::move(h), Basis::fock);
}

namespace {

// rho -> -i[H,rho] + sum_c (c rho c^+ - 1/2 {c^+c, rho}), all dense.
Matrix apply_liouvillian(const Matrix& h, const std::vector<Matrix>& cops,
                         const std::vector<Matrix>& cdagc, const Matrix& rho) {
    Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
    for (std::size_t i = 0; i < cops.size(); ++i) {
        out += cops[i] * rho * cops[i].adjoint();
        out -= 0.5 * (cdagc[i] * rho + rho * cdagc[i]);
    }
    return out;
}

std::vector<Matrix> make_cdagc(const std::vector<Matrix>& cops) {
    std::vector<Matrix> v;
    v.reserve(cops.size());
    for (const Matrix& c : cops)
        v.push_back(c.adjoint() * c);
    return v;
}

} // namespace

SteadyStateResult steady_state(const Matrix& h_rf_ang, const std::vector<Matrix>& cops,
                               double residual_tol) {
    const int dim = static_cast<int>(h_rf_ang.rows());
    if (h_rf_ang.cols() != dim)
        throw SolverError("steady_state: Hamiltonian must be square");
    if ((h_rf_ang - h_rf_ang.adjoint()).norm() > 1e-9 * std::max(1.0, h_rf_ang.norm()))
        throw SolverError("steady_state: Hamiltonian is not Hermitian");
    const int n2 = dim * dim;
    const std::vector<Matrix> cdagc = make_cdagc(cops);

    // vec(rho) is column-major: index(i,j) = j*dim + i
    Matrix liou = Matrix::Zero(n2, n2);
    auto idx = [dim](int i, int j) { return j * dim + i; };
    const Complex mi(0.0, -1.0);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            Complex hv = h_rf_ang(i, k);
            Complex kv(0.0, 0.0);
            for (const Matrix& K : cdagc)
                kv += K(i, k);
            if (hv == Complex(0.0) && kv == Complex(0.0)) continue;
            for (int j = 0; j < dim; ++j) {
                liou(idx(i, j), idx(k, j)) += mi * hv - 0.5 * kv;       // H rho, K rho
                liou(idx(j, i), idx(j, k)) += -mi * std::conj(hv)      // rho H
                                              - 0.5 * std::conj(kv);    // rho K
            }
        }
    for (const Matrix& c : cops) {
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) {
                const Complex cik = c(i, k);
                if (cik == Complex(0.0)) continue;
                for (int j = 0; j < dim; ++j)
                    for (int l = 0; l < dim; ++l) {
                        const Complex cjl = std::conj(c(j, l));
                        if (cjl == Complex(0.0)) continue;
                        liou(idx(i, j), idx(k, l)) += cik * cjl;
                    }
            }
    }

    // trace condition replaces the first row
    Eigen::VectorXcd saved_row0 = liou.row(0);
    liou.row(0).setZero();
    for (int m = 0; m < dim; ++m)
        liou(0, idx(m, m)) = Complex(1.0);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n2);
    rhs(0) = Complex(1.0);

    Eigen::VectorXcd v = liou.partialPivLu().solve(rhs);

    auto finish = [&](const Eigen::VectorXcd& vec) -> SteadyStateResult {
        Matrix rho = Eigen::Map<const Matrix>(vec.data(), dim, dim);
        const double herm_defect = (rho - rho.adjoint()).norm();
        rho = 0.5 * (rho + rho.adjoint());
        const Complex tr = rho.trace();
        if (std::abs(tr) < 1e-12)
            throw SolverError("steady_state: zero-trace solution");
        rho /= tr;
        SteadyStateResult res;
        res.rho = DensityMatrix{rho, std::nullopt};
        res.residual = apply_liouvillian(h_rf_ang, cops, cdagc, rho).norm();
        if (herm_defect > 1e-8 || !std::isfinite(res.residual))
            res.residual = std::numeric_limits<double>::infinity();
        Complex ae(0.0, 0.0);
        for (int m = 1; m < dim; ++m)
            ae += std::sqrt(static_cast<double>(m)) * rho(m, m - 1);
        res.a_expect = ae;
        double n = 0.0;
        for (int m = 0; m < dim; ++m)
            n += m * rho(m, m).real();
        if (n < -1e-6)
            throw SolverError("steady_state: negative photon number");
        res.n_expect = std::max(0.0, n);
        res.top_population = rho(dim - 1, dim - 1).real();
        res.fock_dim = dim;
        return res;
    };

    SteadyStateResult res = finish(v);
    if (res.residual > residual_tol) {
        // restore the dropped equation and solve the stacked least-squares system
        Matrix stacked(n2 + 1, n2);
        stacked.topRows(1) = saved_row0.transpose();
        stacked.middleRows(1, n2 - 1) = liou.bottomRows(n2 - 1);
        stacked.row(n2).setZero();
        for (int m = 0; m < dim; ++m)
            stacked(n2, idx(m, m)) = Complex(1.0);
        Eigen::VectorXcd rhs2 = Eigen::VectorXcd::Zero(n2 + 1);
        rhs2(n2) = Complex(1.0);
        Eigen::VectorXcd v2 = stacked.colPivHouseholderQr().solve(rhs2);
        res = finish(v2);
        if (res.residual > residual_tol) {
            std::ostringstream os;
            os << "steady_state: Liouvillian kernel appears degenerate (residual "
               << res.residual << " above tolerance " << residual_tol << ")";
            throw SolverError(os.str());
        }
    }
    res.rho.validate();
    return res;
}

Transmission transmission(const SteadyStateResult& ss, const CircuitParams& p,
                          double eps_ang) {
    if (eps_ang <= 0.0)
        throw ConfigError("transmission: zero input power");
    const double kl = p.kappa_c_ang();
    const double kr = p.kappa_c_ang();
    Transmission out;
    out.t = Complex(0.0, -1.0) * std::sqrt(kl * kr) * ss.a_expect / eps_ang;
    const Complex r = Complex(1.0, 0.0) - Complex(0.0, 1.0) * kl * ss.a_expect / eps_ang;
    out.T = std::norm(out.t);
    out.R = std::norm(r);
    return out;
}

Trajectory time_evolve(const HamiltonianFn& h_of_t_ang, const std::vector<Matrix>& cops,
                       const Matrix& rho0, double t0_ns, double t1_ns,
                       const std::vector<double>& sample_times, double tol) {
    const int dim = static_cast<int>(rho0.rows());
    if (rho0.cols() != dim)
        throw SolverError("time_evolve: rho0 must be square");
    if (!(t1_ns > t0_ns))
        throw ConfigError("time_evolve: need t1 > t0");
    DensityMatrix{rho0, std::nullopt}.validate();
    const std::vector<Matrix> cdagc = make_cdagc(cops);
    Matrix ksum = Matrix::Zero(dim, dim);
    for (const Matrix& K : cdagc)
        ksum += K;

    detail::CVec y(static_cast<std::size_t>(dim) * dim);
    Eigen::Map<Matrix>(y.data(), dim, dim) = rho0;

    Matrix hbuf(dim, dim), t1buf(dim, dim), t2buf(dim, dim);
    auto rhs = [&](double t, const Complex* yp, Complex* op) {
        Eigen::Map<const Matrix> r(yp, dim, dim);
        Eigen::Map<Matrix> o(op, dim, dim);
        hbuf = h_of_t_ang(t);
        o = Complex(0.0, -1.0) * (hbuf * r - r * hbuf);
        o.noalias() -= 0.5 * (ksum * r + r * ksum);
        for (const Matrix& c : cops) {
            t1buf.noalias() = c * r;
            o.noalias() += t1buf * c.adjoint();
        }
    };

    Trajectory traj;
    traj.t_ns.reserve(sample_times.size());
    auto on_sample = [&](double t, const Complex* yp) {
        Eigen::Map<const Matrix> r(yp, dim, dim);
        traj.t_ns.push_back(t);
        Complex ae(0.0, 0.0);
        for (int m = 1; m < dim; ++m)
            ae += std::sqrt(static_cast<double>(m)) * r(m, m - 1);
        traj.a_expect.push_back(ae);
        std::vector<double> pops(dim);
        double tr = 0.0;
        for (int m = 0; m < dim; ++m) {
            pops[m] = r(m, m).real();
            tr += pops[m];
        }
        traj.populations.push_back(std::move(pops));
        traj.max_trace_defect = std::max(traj.max_trace_defect, std::abs(tr - 1.0));
    };

    detail::Dopri5Options opt;
    opt.tol = tol;
    detail::dopri5_integrate(rhs, y, t0_ns, t1_ns, sample_times, on_sample, opt);

    if (traj.max_trace_defect > 1e-7)
        throw SolverError("time_evolve: trace drifted by more than 1e-7 over the span");
    return traj;
}

Complex demodulate(const Trajectory& traj, double f_target_GHz, double f_frame_GHz,
                   double window_start_ns) {
    if (traj.t_ns.size() < 2)
        throw SolverError("demodulate: trajectory too short");
    std::size_t i0 = 0;
    while (i0 < traj.t_ns.size() && traj.t_ns[i0] < window_start_ns - 1e-12)
        ++i0;
    if (traj.t_ns.size() - i0 < 2)
        throw SolverError("demodulate: window contains fewer than 2 samples");

    const double fbeat = f_target_GHz - f_frame_GHz;
    const double delta = angular_from_GHz(fbeat);
    const double span = traj.t_ns.back() - traj.t_ns[i0];

    std::size_t count = traj.t_ns.size() - i0;
    if (std::abs(fbeat) > 1e-12) {
        const double period = 1.0 / std::abs(fbeat);
        const double periods = std::floor(span / period + 1e-9);
        if (periods < 20.0)
            throw SolverError("demodulate: window shorter than 20 beat periods");
        const double t_cut = traj.t_ns[i0] + periods * period;
        std::size_t i1 = i0;
        while (i1 < traj.t_ns.size() && traj.t_ns[i1] < t_cut - 1e-9)
            ++i1;
        count = i1 - i0;
    }

    Complex acc(0.0, 0.0);
    for (std::size_t i = i0; i < i0 + count; ++i)
        acc += traj.a_expect[i] * std::exp(Complex(0.0, delta * traj.t_ns[i]));
    return acc / static_cast<double>(count);
}

double output_power_aW(double kappa_out_ang, double f_GHz, Complex amplitude) {
    return power_aW_from_flux(kappa_out_ang * std::norm(amplitude), f_GHz);
}

OneToneResponse steady_one_tone(const CircuitParams& p, double f_GHz, double power_aW,
                                const SolverSettings& s) {
    const double ej = ej_at_flux(p);
    const auto [f01, f12] = transition_frequencies(ej, p.ec_GHz);
    (void)f12;
    const double eps = drive_amplitude(power_aW, f_GHz, p.kappa_c_MHz);
    DriveSpec drive{{Tone{f_GHz, power_aW, Port::left}}, false};

    OneToneResponse out;
    out.n_linear = 4.0 * p.kappa_c_ang() * photon_flux_per_ns(power_aW, f_GHz) /
                   (p.kappa_tot_ang() * p.kappa_tot_ang());
    for (int dim = s.fock_dim; dim <= s.max_fock_dim; dim += s.escalation_step) {
        const auto h_kerr = kerr_hamiltonian(f01, p.ec_GHz, dim);
        const auto h_rf = rotating_frame_hamiltonian(h_kerr, drive, eps);
        SteadyStateResult ss =
            steady_state(h_rf.entries, collapse_operators(p, dim), s.steady_residual_tol);
        out.tr = transmission(ss, p, eps);
        out.n_expect = ss.n_expect;
        out.fock_dim = dim;
        out.converged = ss.top_population < s.top_pop_tol;
        if (out.converged) break;
    }
    if (!out.converged)
        throw SolverError("steady_one_tone: Fock truncation cap reached with "
                          "top-level population above tolerance");
    return out;
}

namespace {

// Right-hand side in the rotating frame of tone 1 with the Kerr diagonal
// rotated away exactly. The only stiff scale left is the drive itself.
struct InteractionPictureRhs {
    int dim;
    double kt, eps1, eps2, dbeat, delta1, alpha;
    std::vector<double> sq; // sqrt(k)
    mutable std::vector<Complex> c, g;

    InteractionPictureRhs(int d, double kt_, double e1, double e2, double db,
                          double delta1_, double alpha_)
        : dim(d), kt(kt_), eps1(e1), eps2(e2), dbeat(db), delta1(delta1_), alpha(alpha_),
          sq(d, 0.0), c(d, Complex(0.0)), g(d, Complex(0.0)) {
        for (int k = 1; k < dim; ++k)
            sq[k] = std::sqrt(static_cast<double>(k));
    }

    // rotation frequencies w_k = delta1 - alpha*(k-1) form an arithmetic
    // progression, so the phase ladder follows a two-term recurrence
    void fill_g(double t) const {
        Complex ph = std::exp(Complex(0.0, -delta1 * t));
        const Complex ratio = std::exp(Complex(0.0, alpha * t));
        for (int k = 1; k < dim; ++k) {
            g[k] = sq[k] * ph;
            ph *= ratio;
        }
    }

    void operator()(double t, const Complex* y, Complex* out) const {
        fill_g(t);
        const Complex drive = eps1 + eps2 * std::exp(Complex(0.0, dbeat * t));
        for (int k = 1; k < dim; ++k)
            c[k] = drive * g[k];
        kernels::lindblad_tridiag_rhs(dim, y, out, c.data(), g.data(), kt);
    }

    // <a> in the tone-1 rotating frame (undoes the diagonal rotation)
    Complex a_expect(double t, const Complex* y) const {
        fill_g(t);
        Complex ae(0.0, 0.0);
        for (int k = 1; k < dim; ++k)
            ae += y[static_cast<std::size_t>(k) * dim + (k - 1)] * g[k];
        return ae;
    }
};

} // namespace

TwoToneResponse two_tone_response(const CircuitParams& p, const Tone& pump,
                                  const Tone& probe, const SolverSettings& s) {
    const double fbeat = probe.f_GHz - pump.f_GHz;
    if (std::abs(fbeat) < 1e-9)
        throw ConfigError("two_tone_response: tones at equal frequency; "
                          "use the single-tone path");
    const double ej = ej_at_flux(p);
    const auto [f01, f12] = transition_frequencies(ej, p.ec_GHz);
    (void)f12;
    const double kt = p.kappa_tot_ang();
    const double eps1 = drive_amplitude(pump.power_aW, pump.f_GHz, p.kappa_c_MHz);
    const double eps2 = drive_amplitude(probe.power_aW, probe.f_GHz, p.kappa_c_MHz);
    if (eps2 <= 0.0)
        throw ConfigError("two_tone_response: probe power must be > 0");
    const double delta1 = angular_from_GHz(f01 - pump.f_GHz);
    const double alpha = angular_from_GHz(p.ec_GHz);
    const double dbeat = angular_from_GHz(fbeat);
    const double period = 1.0 / std::abs(fbeat);
    const double dt = period / s.samples_per_period;
    const std::size_t nwin = static_cast<std::size_t>(s.window_beat_periods) *
                             static_cast<std::size_t>(s.samples_per_period);

    TwoToneResponse out;
    for (int dim = s.fock_dim; dim <= s.max_fock_dim; dim += s.escalation_step) {
        InteractionPictureRhs rhs(dim, kt, eps1, eps2, dbeat, delta1, alpha);
        detail::CVec y(static_cast<std::size_t>(dim) * dim, Complex(0.0));
        y[0] = Complex(1.0); // vacuum

        double t_cursor = 0.0;
        double window_start = s.transient_kappa_factor / kt;
        double top_pop = 0.0;
        double trace_defect = 0.0;
        bool drift_ok = false;
        Complex demod_full(0.0, 0.0);
        double drift = 0.0;

        detail::Dopri5Options opt;
        opt.tol = s.ode_tol;

        while (true) {
            std::vector<double> ts(nwin);
            for (std::size_t i = 0; i < nwin; ++i)
                ts[i] = window_start + static_cast<double>(i) * dt;
            const double t_end = ts.back() + dt;

            Complex acc_first(0.0, 0.0), acc_second(0.0, 0.0);
            double win_top = 0.0, win_trace = 0.0;
            std::size_t seen = 0;
            auto on_sample = [&](double t, const Complex* yp) {
                const Complex ae = rhs.a_expect(t, yp);
                const Complex z = ae * std::exp(Complex(0.0, dbeat * t));
                if (seen < nwin / 2)
                    acc_first += z;
                else
                    acc_second += z;
                ++seen;
                double tr = 0.0;
                for (int m = 0; m < dim; ++m)
                    tr += yp[static_cast<std::size_t>(m) * dim + m].real();
                win_trace = std::max(win_trace, std::abs(tr - 1.0));
                win_top = std::max(
                    win_top, yp[static_cast<std::size_t>(dim - 1) * dim + dim - 1].real());
            };

            detail::dopri5_integrate(rhs, y, t_cursor, t_end, ts, on_sample, opt);
            t_cursor = t_end;
            top_pop = std::max(top_pop, win_top);
            trace_defect = std::max(trace_defect, win_trace);

            const Complex a1 = acc_first / static_cast<double>(nwin / 2);
            const Complex a2 = acc_second / static_cast<double>(nwin - nwin / 2);
            demod_full = (acc_first + acc_second) / static_cast<double>(nwin);
            drift = std::abs(a2 - a1);

            if (top_pop >= s.top_pop_tol)
                break; // escalate now, no point converging this dimension
            if (drift <= s.drift_tol) {
                drift_ok = true;
                break;
            }
            window_start = t_cursor + s.transient_kappa_factor / kt;
            if (window_start + static_cast<double>(nwin) * dt > s.max_evolve_ns)
                break; // give up on drift, report unconverged
        }

        out.probe_amp = demod_full;
        out.probe_T = p.kappa_c_ang() * p.kappa_c_ang() * std::norm(demod_full) /
                      (eps2 * eps2);
        out.p_out_aW = output_power_aW(p.kappa_c_ang(), probe.f_GHz, demod_full);
        out.drift = drift;
        out.top_population = top_pop;
        out.fock_dim = dim;
        out.converged = drift_ok && top_pop < s.top_pop_tol && trace_defect <= 1e-7;
        if (top_pop < s.top_pop_tol)
            return out;
    }
    out.converged = false;
    return out;
}

} // namespace jjr
