#include "jjr/circuit.hpp"

#include <cmath>
#include <sstream>

namespace jjr {

void CircuitParams::validate() const {
    if (!(ej_max_GHz > 0.0))
        throw ConfigError("CircuitParams: EJ_max_GHz must be > 0");
    if (!(ec_GHz > 0.0))
        throw ConfigError("CircuitParams: Ec_GHz must be > 0");
    if (!(kappa_c_MHz > 0.0))
        throw ConfigError("CircuitParams: kappa_c_MHz must be > 0");
    if (kappa_i_MHz < 0.0)
        throw ConfigError("CircuitParams: kappa_i_MHz must be >= 0");
    if (!(z0_Ohm > 0.0))
        throw ConfigError("CircuitParams: Z0_Ohm must be > 0");
    if (asymmetry_d < 0.0 || asymmetry_d >= 1.0)
        throw ConfigError("CircuitParams: asymmetry_d must lie in [0,1)");
    if (!std::isfinite(flux))
        throw ConfigError("CircuitParams: flux must be finite");
}

double ej_at_flux(const CircuitParams& p, bool allow_nontransmon) {
    p.validate();
    const double c = std::cos(pi * p.flux);
    const double s = std::sin(pi * p.flux);
    const double d = p.asymmetry_d;
    // |cos| * sqrt(1 + d^2 tan^2) written tan-free so flux = 1/2 is finite
    const double ej = p.ej_max_GHz * std::sqrt(c * c + d * d * s * s);
    if (!allow_nontransmon && ej <= p.ec_GHz) {
        std::ostringstream os;
        os << "ej_at_flux: EJ(flux=" << p.flux << ") = " << ej
           << " GHz leaves the transmon regime (EJ/Ec <= 1); "
              "pass allow_nontransmon to override";
        throw ConfigError(os.str());
    }
    return ej;
}

std::pair<double, double> transition_frequencies(double ej_GHz, double ec_GHz) {
    if (!(ej_GHz > 0.0) || !(ec_GHz > 0.0))
        throw ConfigError("transition_frequencies: EJ and Ec must be > 0");
    if (ej_GHz / ec_GHz <= 1.0)
        throw ConfigError("transition_frequencies: requires EJ/Ec > 1");
    const double plasma = std::sqrt(8.0 * ej_GHz * ec_GHz);
    return {plasma - ec_GHz, plasma - 2.0 * ec_GHz};
}

double eigenenergy_asymptotic(int n, double ej_GHz, double ec_GHz) {
    if (n < 0)
        throw ConfigError("eigenenergy_asymptotic: level index must be >= 0");
    if (!(ej_GHz > 0.0) || !(ec_GHz > 0.0) || ej_GHz / ec_GHz <= 1.0)
        throw ConfigError("eigenenergy_asymptotic: requires EJ, Ec > 0 and EJ/Ec > 1");
    const double plasma = std::sqrt(8.0 * ej_GHz * ec_GHz);
    const double dn = static_cast<double>(n);
    return plasma * (dn + 0.5) - (ec_GHz / 4.0) * (2.0 * dn * dn + 2.0 * dn + 1.0);
}

DerivedCircuit derived_quantities(const CircuitParams& p) {
    const double ej = ej_at_flux(p);
    const auto [f01, f12] = transition_frequencies(ej, p.ec_GHz);

    const PhysicalConstants c = physical_constants();
    const double ej_J = c.h * ej * 1e9;
    const double ec_J = c.h * p.ec_GHz * 1e9;

    DerivedCircuit d;
    d.f01_GHz = f01;
    d.f12_GHz = f12;
    d.inductance_H = c.hbar * c.hbar / (4.0 * c.e * c.e * ej_J);
    d.c_sigma_F = c.e * c.e / (2.0 * ec_J);
    d.zr_Ohm = std::sqrt(d.inductance_H / d.c_sigma_F);
    // C_c = sqrt(kappa_c / (8 pi^3 f01^3 Z0 Zr)), kappa_c angular in rad/s
    const double kappa_c_rad_s = 2.0 * pi * p.kappa_c_MHz * 1e6;
    const double f01_Hz = f01 * 1e9;
    d.c_coupling_F = std::sqrt(
        kappa_c_rad_s / (8.0 * pi * pi * pi * f01_Hz * f01_Hz * f01_Hz * p.z0_Ohm * d.zr_Ohm));
    return d;
}

double ec_from_splitting(double f01_GHz, double f12_GHz) {
    if (!(f01_GHz > f12_GHz))
        throw ConfigError("ec_from_splitting: requires f01 > f12");
    return f01_GHz - f12_GHz;
}

} // namespace jjr
