#pragma once

#include <utility>
#include <vector>

#include "jjr/operator_matrix.hpp"

namespace jjr {

enum class SpectrumMethod { exact_charge_basis, asymptotic };

/// Lowest eigenenergies E_n/h (GHz), ascending.
struct Spectrum {
    std::vector<double> energies_GHz;
    SpectrumMethod method = SpectrumMethod::exact_charge_basis;

    int levels() const { return static_cast<int>(energies_GHz.size()); }
    /// Transition energy E_j - E_i in GHz.
    double gap(int i, int j) const;
};

/// Cooper-pair-box Hamiltonian on the charge basis m in [-N, N]:
/// H/h = 4 Ec (m - ng)^2 |m><m| - (EJ/2)(|m><m+1| + h.c.)
QuantumOperatorMatrix build_cpb_hamiltonian(double ej_GHz, double ec_GHz, double n_g,
                                            int charge_cutoff);

/// k lowest eigenvalues of a Hermitian operator, ascending.
Spectrum eigen_spectrum(const QuantumOperatorMatrix& h, int k);

/// Kerr (Duffing) Hamiltonian on the Fock basis:
/// H/h = f01 n - (Ec/2) n(n-1). Diagonal; gap(n -> n+1) = f01 - n Ec.
QuantumOperatorMatrix kerr_hamiltonian(double f01_GHz, double ec_GHz, int fock_dim);

/// Annihilation / creation pair on a truncated Fock basis.
std::pair<QuantumOperatorMatrix, QuantumOperatorMatrix> ladder_operators(int fock_dim);

/// Asymptotic ladder spectrum (eigenenergy_asymptotic for n = 0..levels-1).
Spectrum asymptotic_spectrum(double ej_GHz, double ec_GHz, int levels);

} // namespace jjr
