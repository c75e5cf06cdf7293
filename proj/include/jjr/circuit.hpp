#pragma once

#include <utility>

#include "jjr/constants.hpp"
#include "jjr/errors.hpp"

namespace jjr {

/// Physical parameters of the single-junction resonator. Single source of
/// truth for a device; all other modules derive from it.
struct CircuitParams {
    double ej_max_GHz = 0.0;   ///< Josephson energy at zero flux, E_J/h
    double ec_GHz = 0.0;       ///< charging energy E_c/h
    double kappa_c_MHz = 0.0;  ///< per-port coupling rate kappa_c/2pi
    double kappa_i_MHz = 0.0;  ///< internal loss rate kappa_i/2pi
    double z0_Ohm = 50.0;      ///< feed line impedance
    double flux = 0.0;         ///< Phi/Phi0
    double asymmetry_d = 0.0;  ///< SQUID junction asymmetry, in [0,1)

    void validate() const;

    // Convenience accessors in angular units (rad/ns).
    double kappa_c_ang() const { return angular_from_MHz(kappa_c_MHz); }
    double kappa_i_ang() const { return angular_from_MHz(kappa_i_MHz); }
    // Total linewidth 2*kappa_c + kappa_i (symmetric two-port design).
    double kappa_tot_ang() const { return 2.0 * kappa_c_ang() + kappa_i_ang(); }
};

/// Quantities derived from CircuitParams, reported in SI.
struct DerivedCircuit {
    double f01_GHz = 0.0;
    double f12_GHz = 0.0;
    double inductance_H = 0.0;    ///< L = hbar^2 / (4 e^2 E_J)
    double c_sigma_F = 0.0;       ///< total capacitance e^2 / (2 E_c)
    double zr_Ohm = 0.0;          ///< characteristic impedance sqrt(L/C_sigma)
    double c_coupling_F = 0.0;    ///< coupling capacitance from kappa_c
};

/// Flux-tuned Josephson energy of the SQUID,
/// EJ_max * |cos(pi*flux)| * sqrt(1 + d^2 tan^2(pi*flux)).
/// Throws unless the result stays in the transmon regime EJ/Ec > 1;
/// pass allow_nontransmon=true to get the raw value anyway.
double ej_at_flux(const CircuitParams& p, bool allow_nontransmon = false);

/// First two transition frequencies of the junction mode:
/// f01 = sqrt(8 EJ Ec) - Ec, f12 = f01 - Ec.
std::pair<double, double> transition_frequencies(double ej_GHz, double ec_GHz);

/// Level energy E_n/h = sqrt(8 EJ Ec)(n + 1/2) - (Ec/4)(2n^2 + 2n + 1).
/// Gaps of this ladder reproduce f01 and f12 exactly.
double eigenenergy_asymptotic(int n, double ej_GHz, double ec_GHz);

/// All SI-valued circuit elements for the operating point of `p`.
DerivedCircuit derived_quantities(const CircuitParams& p);

/// Charging energy from the measured first/second transition splitting.
double ec_from_splitting(double f01_GHz, double f12_GHz);

} // namespace jjr
