#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "jjr/dynamics.hpp"
#include "jjr/spectrum.hpp"

using namespace jjr;

namespace {

CircuitParams paper_device() {
    CircuitParams p;
    p.ej_max_GHz = 10.8;
    p.ec_GHz = 0.29;
    p.kappa_c_MHz = 12.0;
    p.kappa_i_MHz = 3.0;
    return p;
}

double linear_nbar(const CircuitParams& p, double power_aW, double f_GHz) {
    const double kt = p.kappa_tot_ang();
    return 4.0 * p.kappa_c_ang() * photon_flux_per_ns(power_aW, f_GHz) / (kt * kt);
}

SteadyStateResult solve_on_resonance(const CircuitParams& p, double ec_GHz,
                                     double power_aW, double f_GHz, int dim) {
    const double eps = drive_amplitude(power_aW, f_GHz, p.kappa_c_MHz);
    const auto h_kerr = kerr_hamiltonian(f_GHz, ec_GHz, dim); // drive on resonance
    DriveSpec drive{{Tone{f_GHz, power_aW, Port::left}}, false};
    return steady_state(rotating_frame_hamiltonian(h_kerr, drive, eps).entries,
                        collapse_operators(p, dim));
}

} // namespace

TEST_CASE("collapse operators") {
    const CircuitParams p = paper_device();
    const auto ops = collapse_operators(p, 5);
    REQUIRE(ops.size() == 3);
    // sqrt(kappa) scaling with kappa = 2*pi*12e6 rad/s = 2*pi*0.012 rad/ns
    const double expect = std::sqrt(2.0 * pi * 0.012);
    CHECK(ops[0](0, 1).real() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ops[1](0, 1).real() == doctest::Approx(expect).epsilon(1e-12));

    SUBCASE("total linewidth from the three channels") {
        double sum = 0.0;
        for (const auto& c : ops)
            sum += (c.adjoint() * c)(1, 1).real();
        CHECK(sum == doctest::Approx(2.0 * pi * 0.027).epsilon(1e-12));
        CHECK(sum == doctest::Approx(p.kappa_tot_ang()).epsilon(1e-12));
    }
    SUBCASE("lossless internal channel has zero norm") {
        CircuitParams q = p;
        q.kappa_i_MHz = 0.0;
        const auto o = collapse_operators(q, 5);
        CHECK(o[2].norm() == doctest::Approx(0.0));
        CHECK(o[0].norm() > 0.0);
        CHECK(o[1].norm() > 0.0);
    }
}

TEST_CASE("drive amplitude normalization") {
    const CircuitParams p = paper_device();
    CHECK(drive_amplitude(0.0, 4.86, 12.0) == doctest::Approx(0.0));
    CHECK(drive_amplitude(4.0, 4.86, 12.0) ==
          doctest::Approx(2.0 * drive_amplitude(1.0, 4.86, 12.0)).epsilon(1e-12));
    // the paper's linear photon number at 8.6 aW / 4.86 GHz
    CHECK(linear_nbar(p, 8.6, 4.86) == doctest::Approx(0.028).epsilon(0.01));
}

TEST_CASE("rotating frame hamiltonian") {
    const auto h_kerr = kerr_hamiltonian(4.7156, 0.29, 5);

    SUBCASE("on resonance the detuning vanishes") {
        DriveSpec d{{Tone{4.7156, 10.0, Port::left}}, false};
        const auto h = rotating_frame_hamiltonian(h_kerr, d, 0.1);
        CHECK(h.entries(1, 1).real() == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("zero drive leaves a diagonal matrix") {
        DriveSpec d{{Tone{4.70, 10.0, Port::left}}, false};
        const auto h = rotating_frame_hamiltonian(h_kerr, d, 0.0);
        CHECK((h.entries - Matrix(h.entries.diagonal().asDiagonal())).norm() ==
              doctest::Approx(0.0));
        CHECK(h.entries(1, 1).real() ==
              doctest::Approx(angular_from_GHz(4.7156 - 4.70)).epsilon(1e-12));
    }
    SUBCASE("resonant 0-1 block splits by 2 eps") {
        DriveSpec d{{Tone{4.7156, 10.0, Port::left}}, false};
        const double eps = 0.05;
        const auto h = rotating_frame_hamiltonian(h_kerr, d, eps);
        Eigen::SelfAdjointEigenSolver<Matrix> es(h.entries.topLeftCorner(2, 2));
        CHECK(es.eigenvalues()(1) - es.eigenvalues()(0) ==
              doctest::Approx(2.0 * eps).epsilon(1e-12));
    }
    SUBCASE("two-tone specs rejected") {
        DriveSpec d{{Tone{4.7, 10.0, Port::left}, Tone{4.4, 10.0, Port::left}}, false};
        CHECK_THROWS_AS(rotating_frame_hamiltonian(h_kerr, d, 0.1), ConfigError);
    }
}

TEST_CASE("steady state of the undriven cavity is the vacuum") {
    const CircuitParams p = paper_device();
    const auto h_kerr = kerr_hamiltonian(4.7156, 0.29, 6);
    DriveSpec d{{Tone{4.7156, 1.0, Port::left}}, false};
    const auto h = rotating_frame_hamiltonian(h_kerr, d, 0.0);
    const auto ss = steady_state(h.entries, collapse_operators(p, 6));
    CHECK(ss.rho.rho(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ss.n_expect == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ss.residual < 1e-10);
}

TEST_CASE("linear cavity reproduces the closed-form photon number within 1%") {
    const CircuitParams p = paper_device();
    for (double power : {1.0, 8.6, 100.0}) {
        const auto ss = solve_on_resonance(p, 0.0, power, 4.86, 18);
        const double expect = linear_nbar(p, power, 4.86);
        CHECK(std::abs(ss.n_expect - expect) / expect < 0.01);
        ss.rho.validate();
        CHECK(ss.residual < 1e-10);
    }
}

TEST_CASE("linear on-resonance transmission and reflection anchors") {
    const CircuitParams p = paper_device();
    const double eps = drive_amplitude(8.6, 4.86, p.kappa_c_MHz);
    const auto ss = solve_on_resonance(p, 0.0, 8.6, 4.86, 15);
    const auto tr = transmission(ss, p, eps);
    CHECK(tr.T == doctest::Approx(0.790123).epsilon(1e-4));
    CHECK(tr.R == doctest::Approx(0.012346).epsilon(1e-3));
    CHECK(tr.T + tr.R <= 1.0 + 1e-6);

    SUBCASE("lorentzian linewidth of 27 MHz") {
        // at detuning = half the linewidth the transmission halves
        const double f = 4.86 + 0.0135;
        const double eps2 = drive_amplitude(8.6, f, p.kappa_c_MHz);
        const auto h = kerr_hamiltonian(4.86, 0.0, 15);
        DriveSpec d{{Tone{f, 8.6, Port::left}}, false};
        const auto ssd = steady_state(rotating_frame_hamiltonian(h, d, eps2).entries,
                                      collapse_operators(p, 15));
        const auto trd = transmission(ssd, p, eps2);
        CHECK(trd.T == doctest::Approx(0.5 * 0.790123).epsilon(1e-3));
    }
    SUBCASE("overwhelming internal loss kills transmission") {
        CircuitParams q = p;
        q.kappa_i_MHz = 1e5;
        const auto ssq = solve_on_resonance(q, 0.0, 8.6, 4.86, 6);
        const double epsq = drive_amplitude(8.6, 4.86, q.kappa_c_MHz);
        CHECK(transmission(ssq, q, epsq).T < 1e-5);
    }
    SUBCASE("zero input power is an error") {
        CHECK_THROWS_AS(transmission(ss, p, 0.0), ConfigError);
    }
}

TEST_CASE("kerr bleaching on resonance at 1000 aW") {
    const CircuitParams p = paper_device();
    const auto [f01, f12] = transition_frequencies(10.8, 0.29);
    (void)f12;
    const double eps_lo = drive_amplitude(8.6, f01, p.kappa_c_MHz);
    const double eps_hi = drive_amplitude(1000.0, f01, p.kappa_c_MHz);
    const auto lo = transmission(solve_on_resonance(p, 0.29, 8.6, f01, 15), p, eps_lo);
    const auto hi = transmission(solve_on_resonance(p, 0.29, 1000.0, f01, 15), p, eps_hi);
    CHECK(hi.T <= 0.1 * lo.T);
    // linear model would hold 3.3 photons here; the junction takes far fewer
    const auto ss_hi = solve_on_resonance(p, 0.29, 1000.0, f01, 15);
    CHECK(linear_nbar(p, 1000.0, f01) > 3.0);
    CHECK(ss_hi.n_expect < 1.0);
}

TEST_CASE("kerr solver approaches the linear solver as Ec -> 0") {
    const CircuitParams p = paper_device();
    const auto kerr = solve_on_resonance(p, 1e-4, 50.0, 4.86, 18);
    const auto lin = solve_on_resonance(p, 0.0, 50.0, 4.86, 18);
    CHECK(std::abs(kerr.a_expect - lin.a_expect) < 1e-3);
}

TEST_CASE("fock escalation enforces truncation safety") {
    const CircuitParams p = paper_device();
    SolverSettings s;
    s.fock_dim = 4;
    const auto [f01, f12] = transition_frequencies(10.8, 0.29);
    (void)f12;
    const auto resp = steady_one_tone(p, f01, 300.0, s);
    CHECK(resp.converged);
    CHECK(resp.fock_dim > 4); // resonant 300 aW overfills a 4-level ladder
}

TEST_CASE("time evolution") {
    const CircuitParams p = paper_device();
    const double kt = p.kappa_tot_ang();

    SUBCASE("undriven excited state decays at the total rate") {
        const int dim = 4;
        Matrix rho0 = Matrix::Zero(dim, dim);
        rho0(1, 1) = 1.0;
        Matrix h0 = Matrix::Zero(dim, dim);
        const auto traj = time_evolve([&](double) { return h0; },
                                      collapse_operators(p, dim), rho0, 0.0, 12.0,
                                      {0.0, 3.0, 6.0, 12.0}, 1e-10);
        for (std::size_t i = 0; i < traj.t_ns.size(); ++i)
            CHECK(traj.populations[i][1] ==
                  doctest::Approx(std::exp(-kt * traj.t_ns[i])).epsilon(1e-7));
        CHECK(traj.max_trace_defect < 1e-7);
    }

    SUBCASE("single-tone trajectory relaxes to the steady state") {
        const int dim = 10;
        const double f01 = 4.7156;
        const double power = 200.0;
        const double eps = drive_amplitude(power, f01, p.kappa_c_MHz);
        DriveSpec d{{Tone{f01, power, Port::left}}, false};
        const auto h = rotating_frame_hamiltonian(kerr_hamiltonian(f01, 0.29, dim), d, eps);
        const auto ss = steady_state(h.entries, collapse_operators(p, dim));

        Matrix rho0 = Matrix::Zero(dim, dim);
        rho0(0, 0) = 1.0;
        std::vector<double> samples;
        for (int i = 0; i <= 40; ++i)
            samples.push_back(120.0 + i * 0.5);
        const auto traj =
            time_evolve([&](double) { return h.entries; }, collapse_operators(p, dim),
                        rho0, 0.0, 140.0, samples, 1e-9);
        Complex mean(0.0, 0.0);
        for (const Complex& a : traj.a_expect)
            mean += a;
        mean /= static_cast<double>(traj.a_expect.size());
        CHECK(std::abs(mean - ss.a_expect) < 1e-4);
    }
}

TEST_CASE("demodulate") {
    SUBCASE("constant signal at the frame frequency") {
        Trajectory tr;
        for (int i = 0; i < 64; ++i) {
            tr.t_ns.push_back(0.25 * i);
            tr.a_expect.push_back(Complex(0.7, -0.2));
        }
        CHECK(std::abs(demodulate(tr, 4.7, 4.7, 0.0) - Complex(0.7, -0.2)) < 1e-14);
    }
    SUBCASE("pure beat picks out its own component") {
        Trajectory tr;
        const double fb = 0.25; // GHz
        const Complex amp(0.3, 0.45);
        const int spp = 32, periods = 25;
        for (int i = 0; i <= spp * periods; ++i) {
            const double t = i * (1.0 / fb) / spp;
            tr.t_ns.push_back(t);
            tr.a_expect.push_back(amp * std::exp(Complex(0.0, -angular_from_GHz(fb) * t)));
        }
        const Complex at = demodulate(tr, 4.7 + fb, 4.7, 0.0);
        CHECK(std::abs(at - amp) < 1e-12);
        // orthogonal at a commensurate different beat
        const Complex off = demodulate(tr, 4.7 + 2 * fb, 4.7, 0.0);
        CHECK(std::abs(off) < 1e-12);
    }
    SUBCASE("window shorter than 20 beat periods is an error") {
        Trajectory tr;
        for (int i = 0; i < 50; ++i) {
            tr.t_ns.push_back(0.1 * i);
            tr.a_expect.push_back(Complex(1.0, 0.0));
        }
        CHECK_THROWS_AS(demodulate(tr, 4.9, 4.7, 0.0), SolverError);
    }
}

TEST_CASE("two-tone engine agrees with the generic dense propagator") {
    const CircuitParams p = paper_device();
    const auto [f01, f12] = transition_frequencies(10.8, 0.29);
    SolverSettings s;
    s.fock_dim = 6;
    const Tone pump{f01, 400.0, Port::left};
    const Tone probe{f12, 8.6, Port::left};
    const auto fast = two_tone_response(p, pump, probe, s);
    CHECK(fast.converged);

    // reference: plain rotating-frame H(t) through the dense path
    const int dim = fast.fock_dim;
    const double eps1 = drive_amplitude(pump.power_aW, pump.f_GHz, p.kappa_c_MHz);
    const double eps2 = drive_amplitude(probe.power_aW, probe.f_GHz, p.kappa_c_MHz);
    const double dbeat = angular_from_GHz(probe.f_GHz - pump.f_GHz);
    const auto [a, ad] = ladder_operators(dim);
    Matrix h0 = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n)
        h0(n, n) = angular_from_GHz((f01 - pump.f_GHz) * n - 0.5 * 0.29 * n * (n - 1.0));
    auto h_of_t = [&](double t) {
        const Complex e2t = eps2 * std::exp(Complex(0.0, dbeat * t));
        Matrix h = h0;
        h += (eps1 + e2t) * a.entries + (eps1 + std::conj(e2t)) * ad.entries;
        return h;
    };
    Matrix rho0 = Matrix::Zero(dim, dim);
    rho0(0, 0) = 1.0;
    const double kt = p.kappa_tot_ang();
    const double ws = s.transient_kappa_factor / kt;
    const double period = 1.0 / std::abs(probe.f_GHz - pump.f_GHz);
    std::vector<double> ts;
    const int n_samp = 20 * s.samples_per_period;
    for (int i = 0; i <= n_samp; ++i) // closing sample makes the span exact
        ts.push_back(ws + i * period / s.samples_per_period);
    const auto traj = time_evolve(h_of_t, collapse_operators(p, dim), rho0, 0.0,
                                  ts.back() + period, ts, s.ode_tol);
    const Complex ref_amp = demodulate(traj, probe.f_GHz, pump.f_GHz, ws);
    const double ref_T =
        p.kappa_c_ang() * p.kappa_c_ang() * std::norm(ref_amp) / (eps2 * eps2);

    CHECK(std::abs(fast.probe_amp - ref_amp) < 2e-5);
    CHECK(fast.probe_T == doctest::Approx(ref_T).epsilon(1e-3));
}

TEST_CASE("pump-off two-tone response matches the single-tone steady state") {
    const CircuitParams p = paper_device();
    const auto [f01, f12] = transition_frequencies(10.8, 0.29);
    SolverSettings s;
    s.fock_dim = 8;
    const auto resp = two_tone_response(p, Tone{f01, 0.0, Port::left},
                                        Tone{f12, 8.6, Port::left}, s);
    CHECK(resp.converged);
    const auto oneline = steady_one_tone(p, f12, 8.6, s);
    CHECK(resp.probe_T == doctest::Approx(oneline.tr.T).epsilon(0.02));
    CHECK(resp.probe_T < 0.01);
}

TEST_CASE("two-tone activation at the paper settings") {
    const CircuitParams p = paper_device();
    const auto [f01, f12] = transition_frequencies(10.8, 0.29);
    SolverSettings s;
    s.fock_dim = 12;
    const auto on = two_tone_response(p, Tone{f01, 1000.0, Port::left},
                                      Tone{f12, 8.6, Port::left}, s);
    CHECK(on.converged);
    CHECK(on.drift < 1e-4);
    const auto off = two_tone_response(p, Tone{f01, 0.0, Port::left},
                                       Tone{f12, 8.6, Port::left}, s);
    CHECK(on.probe_T >= 10.0 * off.probe_T);
}

TEST_CASE("equal-frequency two-tone request is rejected") {
    const CircuitParams p = paper_device();
    SolverSettings s;
    CHECK_THROWS_AS(two_tone_response(p, Tone{4.7, 10.0, Port::left},
                                      Tone{4.7, 8.6, Port::left}, s),
                    ConfigError);
}
