#include <doctest.h>

#include <cmath>

#include "jjr/circuit.hpp"

using namespace jjr;

namespace {

CircuitParams paper_device() {
    CircuitParams p;
    p.ej_max_GHz = 10.8;
    p.ec_GHz = 0.29;
    p.kappa_c_MHz = 12.0;
    p.kappa_i_MHz = 3.0;
    p.z0_Ohm = 50.0;
    p.flux = 0.0;
    return p;
}

} // namespace

TEST_CASE("physical constants are self-consistent") {
    const PhysicalConstants c = physical_constants();
    CHECK(std::abs(c.z_quantum - c.hbar / (c.e * c.e)) / c.z_quantum < 1e-12);
    CHECK(std::abs(c.phi0 - c.h / (2.0 * c.e)) / c.phi0 < 1e-12);
    CHECK(c.z_quantum == doctest::Approx(4108.236).epsilon(1e-4));
}

TEST_CASE("ej_at_flux") {
    CircuitParams p = paper_device();

    SUBCASE("zero flux gives EJ_max") {
        CHECK(ej_at_flux(p) == doctest::Approx(10.8).epsilon(1e-12));
    }
    SUBCASE("half flux quantum collapses a symmetric SQUID") {
        p.flux = 0.5;
        CHECK_THROWS_AS(ej_at_flux(p), ConfigError);
        CHECK(ej_at_flux(p, true) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("periodicity") {
        p.flux = 1.0;
        CHECK(ej_at_flux(p) == doctest::Approx(10.8).epsilon(1e-12));
    }
    SUBCASE("even and periodic over a sampled grid") {
        p.asymmetry_d = 0.15;
        for (int i = 0; i <= 40; ++i) {
            const double phi = -1.0 + i * 0.05;
            CircuitParams a = p, b = p, c = p;
            a.flux = phi;
            b.flux = -phi;
            c.flux = phi + 1.0;
            CHECK(ej_at_flux(a, true) == doctest::Approx(ej_at_flux(b, true)).epsilon(1e-12));
            CHECK(ej_at_flux(a, true) == doctest::Approx(ej_at_flux(c, true)).epsilon(1e-12));
            CHECK(ej_at_flux(a, true) <= 10.8 + 1e-12);
        }
    }
    SUBCASE("asymmetry lifts the node at half flux") {
        p.asymmetry_d = 0.3;
        p.flux = 0.5;
        CHECK(ej_at_flux(p) == doctest::Approx(10.8 * 0.3).epsilon(1e-12));
    }
}

TEST_CASE("transition frequencies reproduce the quoted device values") {
    const auto [f01, f12] = transition_frequencies(10.8, 0.29);
    CHECK(f01 == doctest::Approx(4.7156).epsilon(2e-5));
    CHECK(f12 == doctest::Approx(f01 - 0.29).epsilon(1e-12));

    SUBCASE("harmonic limit") {
        const auto [a, b] = transition_frequencies(10.8, 1e-9);
        CHECK(a - b == doctest::Approx(1e-9).epsilon(1e-6));
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(transition_frequencies(-1.0, 0.29), ConfigError);
        CHECK_THROWS_AS(transition_frequencies(10.8, 0.0), ConfigError);
        CHECK_THROWS_AS(transition_frequencies(0.2, 0.29), ConfigError);
    }
}

TEST_CASE("asymptotic ladder energies") {
    const double ej = 10.8, ec = 0.29;
    const auto [f01, f12] = transition_frequencies(ej, ec);

    CHECK(eigenenergy_asymptotic(1, ej, ec) - eigenenergy_asymptotic(0, ej, ec) ==
          doctest::Approx(f01).epsilon(1e-12));
    CHECK(eigenenergy_asymptotic(2, ej, ec) - eigenenergy_asymptotic(1, ej, ec) ==
          doctest::Approx(f12).epsilon(1e-12));
    // E2 - E0 = f01 + f12
    CHECK(eigenenergy_asymptotic(2, ej, ec) - eigenenergy_asymptotic(0, ej, ec) ==
          doctest::Approx(9.1412).epsilon(1e-4));

    // operating point of the energy-diagram maps: f01 raised by 100 MHz;
    // E3 - E0 = 3*f01 - 3*Ec there, matching the (4.4, 4.8) GHz feature on
    // the 2hf1 + hf2 line
    const double f01_map = f01 + 0.100;
    const double ej_map = (f01_map + ec) * (f01_map + ec) / (8.0 * ec);
    const double e30 =
        eigenenergy_asymptotic(3, ej_map, ec) - eigenenergy_asymptotic(0, ej_map, ec);
    CHECK(e30 == doctest::Approx(13.5768).epsilon(1e-4));
    CHECK(std::abs(2.0 * 4.4 + 4.8 - e30) / std::sqrt(5.0) < 0.015);

    CHECK_THROWS_AS(eigenenergy_asymptotic(-1, ej, ec), ConfigError);
}

TEST_CASE("derived circuit quantities hit the published element values") {
    CircuitParams p = paper_device();
    SUBCASE("C_sigma from Ec alone") {
        const DerivedCircuit d = derived_quantities(p);
        CHECK(d.c_sigma_F == doctest::Approx(67e-15).epsilon(0.02));
    }
    SUBCASE("Zr for the 10.8 GHz junction") {
        const DerivedCircuit d = derived_quantities(p);
        CHECK(d.zr_Ohm == doctest::Approx(476.0).epsilon(0.005));
        // closed form (hbar/e^2) sqrt(Ec/2EJ)
        const double zq = physical_constants().z_quantum;
        CHECK(d.zr_Ohm ==
              doctest::Approx(zq * std::sqrt(0.29 / (2.0 * 10.8))).epsilon(1e-9));
    }
    SUBCASE("C_c at the 4.86 GHz operating point") {
        p.ej_max_GHz = (4.86 + 0.29) * (4.86 + 0.29) / (8.0 * 0.29);
        const DerivedCircuit d = derived_quantities(p);
        CHECK(d.f01_GHz == doctest::Approx(4.86).epsilon(1e-9));
        CHECK(d.c_coupling_F == doctest::Approx(11e-15).epsilon(0.1));
    }
    SUBCASE("impedance consistency Zr^2 = L/C") {
        const DerivedCircuit d = derived_quantities(p);
        CHECK(d.zr_Ohm * d.zr_Ohm ==
              doctest::Approx(d.inductance_H / d.c_sigma_F).epsilon(1e-12));
    }
    SUBCASE("LC frequency approximates f01 within 7 percent") {
        const DerivedCircuit d = derived_quantities(p);
        const double f_lc = 1.0 / (2.0 * pi * std::sqrt(d.inductance_H * d.c_sigma_F)) / 1e9;
        CHECK(std::abs(f_lc - d.f01_GHz) / d.f01_GHz < 0.07);
    }
}

TEST_CASE("ec_from_splitting") {
    CHECK(ec_from_splitting(4.715, 4.44) == doctest::Approx(0.275).epsilon(1e-12));
    CHECK_THROWS_AS(ec_from_splitting(5.0, 5.0), ConfigError);

    SUBCASE("round-trips transition_frequencies exactly") {
        for (double ej : {5.0, 10.8, 40.0})
            for (double ec : {0.1, 0.29, 0.8}) {
                const auto [f01, f12] = transition_frequencies(ej, ec);
                CHECK(ec_from_splitting(f01, f12) == doctest::Approx(ec).epsilon(1e-12));
            }
    }
}

TEST_CASE("parameter validation") {
    CircuitParams p = paper_device();
    p.kappa_c_MHz = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = paper_device();
    p.asymmetry_d = 1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = paper_device();
    p.kappa_i_MHz = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
