#pragma once

#include <cmath>
#include <numbers>

namespace jjr {

// Internal unit convention, used everywhere unless a name says otherwise:
//   energies E/h in GHz, coupling rates kappa/2pi in MHz, time in ns,
//   angular frequencies and drive amplitudes in rad/ns, powers in aW.
// SI conversions happen only where a quantity is reported in SI
// (derived circuit elements, photon fluxes).

struct PhysicalConstants {
    double h;         // Planck constant, J s
    double hbar;      // reduced Planck constant, J s
    double e;         // elementary charge, C
    double phi0;      // flux quantum h/2e, Wb
    double z_quantum; // hbar/e^2, Ohm
};

constexpr PhysicalConstants physical_constants() {
    constexpr double h = 6.62607015e-34;    // exact (SI 2019)
    constexpr double e = 1.602176634e-19;   // exact (SI 2019)
    constexpr double hbar = h / (2.0 * std::numbers::pi);
    return PhysicalConstants{h, hbar, e, h / (2.0 * e), hbar / (e * e)};
}

inline constexpr double pi = std::numbers::pi;

// kappa/2pi in MHz -> angular rate in rad/ns
constexpr double angular_from_MHz(double kappa_MHz) {
    return 2.0 * pi * kappa_MHz * 1e-3;
}

// frequency in GHz -> angular frequency in rad/ns
constexpr double angular_from_GHz(double f_GHz) {
    return 2.0 * pi * f_GHz;
}

// Photon flux P/(h f) expressed per nanosecond.
inline double photon_flux_per_ns(double power_aW, double f_GHz) {
    const PhysicalConstants c = physical_constants();
    return power_aW * 1e-18 / (c.h * f_GHz * 1e9) * 1e-9;
}

// Inverse of photon_flux_per_ns: flux in 1/ns -> power in aW.
inline double power_aW_from_flux(double flux_per_ns, double f_GHz) {
    const PhysicalConstants c = physical_constants();
    return flux_per_ns * 1e9 * c.h * f_GHz * 1e9 * 1e18;
}

} // namespace jjr
