#include <doctest.h>

#include <cmath>

#include "jjr/circuit.hpp"
#include "jjr/spectrum.hpp"

using namespace jjr;

// Frozen reference gaps for EJ/h = 10.8 GHz, Ec/h = 0.29 GHz, ng = 0,
// N = 20, confirmed by two independent diagonalization routes (charge basis
// and a plane-wave phase grid).
static constexpr double kGap01Exact = 4.695569413;
static constexpr double kGap12Exact = 4.350952324;

TEST_CASE("CPB hamiltonian structure") {
    SUBCASE("zero tunneling leaves the charging parabola") {
        const auto h = build_cpb_hamiltonian(0.0, 0.29, 0.0, 5);
        CHECK(h.dim() == 11);
        for (int idx = 0; idx < h.dim(); ++idx) {
            const double m = idx - 5;
            CHECK(h.entries(idx, idx).real() ==
                  doctest::Approx(4.0 * 0.29 * m * m).epsilon(1e-14));
        }
        CHECK(h.entries.cwiseAbs().sum() ==
              doctest::Approx(h.entries.diagonal().cwiseAbs().sum()).epsilon(1e-14));
    }
    SUBCASE("hermitian and tridiagonal") {
        const auto h = build_cpb_hamiltonian(10.8, 0.29, 0.3, 20);
        CHECK(h.is_hermitian(1e-12));
        for (int i = 0; i < h.dim(); ++i)
            for (int j = 0; j < h.dim(); ++j)
                if (std::abs(i - j) > 1) CHECK(h.entries(i, j) == Complex(0.0));
    }
    SUBCASE("cutoff below 5 rejected") {
        CHECK_THROWS_AS(build_cpb_hamiltonian(10.8, 0.29, 0.0, 4), ConfigError);
    }
}

TEST_CASE("exact device spectrum at the paper operating point") {
    const auto h = build_cpb_hamiltonian(10.8, 0.29, 0.0, 20);
    const Spectrum s = eigen_spectrum(h, 4);

    CHECK(s.gap(0, 1) == doctest::Approx(kGap01Exact).epsilon(1e-7));
    CHECK(s.gap(1, 2) == doctest::Approx(kGap12Exact).epsilon(1e-7));
    // the first gap sits within 1% of the asymptotic 4.7156
    CHECK(std::abs(s.gap(0, 1) - 4.7156) / 4.7156 < 0.01);

    SUBCASE("charge dispersion is negligible in the transmon regime") {
        const auto h05 = build_cpb_hamiltonian(10.8, 0.29, 0.5, 20);
        const Spectrum s05 = eigen_spectrum(h05, 2);
        CHECK(std::abs(s.gap(0, 1) - s05.gap(0, 1)) < 1e-3);
    }
}

TEST_CASE("eigen_spectrum plumbing") {
    SUBCASE("diagonal matrix") {
        Matrix m = Matrix::Zero(3, 3);
        m(0, 0) = 1.0;
        m(1, 1) = 2.0;
        m(2, 2) = 3.0;
        const Spectrum s = eigen_spectrum(QuantumOperatorMatrix(m, Basis::fock), 2);
        CHECK(s.energies_GHz[0] == doctest::Approx(1.0));
        CHECK(s.energies_GHz[1] == doctest::Approx(2.0));
    }
    SUBCASE("non-hermitian input rejected") {
        Matrix m = Matrix::Zero(3, 3);
        m(0, 1) = Complex(0.0, 1.0);
        CHECK_THROWS_AS(eigen_spectrum(QuantumOperatorMatrix(m, Basis::fock), 2),
                        SolverError);
    }
    SUBCASE("k out of range rejected") {
        Matrix m = Matrix::Identity(3, 3);
        CHECK_THROWS_AS(eigen_spectrum(QuantumOperatorMatrix(m, Basis::fock), 4),
                        ConfigError);
    }
}

TEST_CASE("cutoff convergence across the transmon range") {
    for (double ratio : {10.0, 37.0, 100.0}) {
        const double ec = 0.29;
        const double ej = ratio * ec;
        const Spectrum s20 = eigen_spectrum(build_cpb_hamiltonian(ej, ec, 0.0, 20), 4);
        const Spectrum s30 = eigen_spectrum(build_cpb_hamiltonian(ej, ec, 0.0, 30), 4);
        for (int n = 0; n < 4; ++n)
            CHECK(std::abs(s20.energies_GHz[n] - s30.energies_GHz[n]) < 1e-9);
    }
}

TEST_CASE("asymptotic ladder tracks the exact spectrum") {
    const double ec = 0.29;
    for (double ratio : {30.0, 37.0, 60.0}) {
        const double ej = ratio * ec;
        const Spectrum ex = eigen_spectrum(build_cpb_hamiltonian(ej, ec, 0.0, 25), 4);
        const Spectrum as = asymptotic_spectrum(ej, ec, 4);
        // first-gap deviation bounded by a tenth of Ec
        CHECK(std::abs(ex.gap(0, 1) - as.gap(0, 1)) / ec < 0.1);
        // per-level error budget grows with n
        for (int n = 1; n < 4; ++n) {
            const double rel =
                std::abs(as.gap(0, n) - ex.gap(0, n)) / ex.gap(0, n);
            CHECK(rel < 0.015 * n);
        }
    }
}

TEST_CASE("kerr hamiltonian") {
    SUBCASE("paper parameters give diag(0, 4.715, 9.14)") {
        const auto h = kerr_hamiltonian(4.715, 0.29, 3);
        CHECK(h.entries(0, 0).real() == doctest::Approx(0.0));
        CHECK(h.entries(1, 1).real() == doctest::Approx(4.715));
        CHECK(h.entries(2, 2).real() == doctest::Approx(2 * 4.715 - 0.29));
        CHECK(h.entries(2, 2).real() == doctest::Approx(9.14).epsilon(1e-12));
    }
    SUBCASE("gap(1->2) matches the second transition") {
        const auto [f01, f12] = transition_frequencies(10.8, 0.29);
        const auto h = kerr_hamiltonian(f01, 0.29, 4);
        CHECK(h.entries(2, 2).real() - h.entries(1, 1).real() ==
              doctest::Approx(f12).epsilon(1e-12));
        CHECK(f12 == doctest::Approx(4.4256).epsilon(1e-4));
    }
    SUBCASE("harmonic limit is an even ladder") {
        const auto h = kerr_hamiltonian(4.7, 0.0, 6);
        for (int n = 1; n < 6; ++n)
            CHECK(h.entries(n, n).real() - h.entries(n - 1, n - 1).real() ==
                  doctest::Approx(4.7).epsilon(1e-14));
    }
    SUBCASE("successive gaps shrink by exactly Ec") {
        const auto h = kerr_hamiltonian(4.7156, 0.29, 8);
        for (int n = 0; n + 2 < 8; ++n) {
            const double g1 = h.entries(n + 1, n + 1).real() - h.entries(n, n).real();
            const double g2 = h.entries(n + 2, n + 2).real() - h.entries(n + 1, n + 1).real();
            CHECK(g1 - g2 == doctest::Approx(0.29).epsilon(1e-12));
        }
    }
    SUBCASE("needs at least three levels") {
        CHECK_THROWS_AS(kerr_hamiltonian(4.7, 0.29, 2), ConfigError);
    }
}

TEST_CASE("ladder operators") {
    SUBCASE("dim 2") {
        const auto [a, ad] = ladder_operators(2);
        CHECK(a.entries(0, 1).real() == doctest::Approx(1.0));
        CHECK(a.entries(0, 0) == Complex(0.0));
        CHECK(a.entries(1, 0) == Complex(0.0));
        CHECK(a.entries(1, 1) == Complex(0.0));
        CHECK(ad.entries(1, 0).real() == doctest::Approx(1.0));
    }
    SUBCASE("number operator entries") {
        const auto [a, ad] = ladder_operators(5);
        const Matrix n = ad.entries * a.entries;
        for (int i = 0; i < 5; ++i)
            CHECK(n(i, i).real() == doctest::Approx(i).epsilon(1e-14));
    }
    SUBCASE("truncation-aware commutator") {
        const int dim = 6;
        const auto [a, ad] = ladder_operators(dim);
        const Matrix comm = a.entries * ad.entries - ad.entries * a.entries;
        for (int i = 0; i + 1 < dim; ++i)
            CHECK(comm(i, i).real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(comm(dim - 1, dim - 1).real() == doctest::Approx(1.0 - dim).epsilon(1e-14));
        CHECK((comm - Matrix(comm.diagonal().asDiagonal())).norm() ==
              doctest::Approx(0.0));
    }
}
