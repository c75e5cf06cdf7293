#include "jjr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "jjr/circuit.hpp"

namespace jjr {

double Spectrum::gap(int i, int j) const {
    if (i < 0 || j < 0 || i >= levels() || j >= levels())
        throw SolverError("Spectrum::gap: level index out of range");
    return energies_GHz[j] - energies_GHz[i];
}

QuantumOperatorMatrix build_cpb_hamiltonian(double ej_GHz, double ec_GHz, double n_g,
                                            int charge_cutoff) {
    if (charge_cutoff < 5)
        throw ConfigError("build_cpb_hamiltonian: charge cutoff N must be >= 5");
    if (!(ej_GHz >= 0.0) || !(ec_GHz > 0.0))
        throw ConfigError("build_cpb_hamiltonian: requires EJ >= 0 and Ec > 0");

    const int dim = 2 * charge_cutoff + 1;
    Matrix h = Matrix::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx) {
        const double m = static_cast<double>(idx - charge_cutoff);
        h(idx, idx) = 4.0 * ec_GHz * (m - n_g) * (m - n_g);
        if (idx + 1 < dim) {
            h(idx, idx + 1) = -0.5 * ej_GHz;
            h(idx + 1, idx) = -0.5 * ej_GHz;
        }
    }
    return QuantumOperatorMatrix(std::move(h), Basis::charge);
}

Spectrum eigen_spectrum(const QuantumOperatorMatrix& h, int k) {
    if (k < 1 || k > h.dim())
        throw ConfigError("eigen_spectrum: need 1 <= k <= dim");
    if (!h.is_hermitian(1e-10))
        throw SolverError("eigen_spectrum: operator is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.entries, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw SolverError("eigen_spectrum: eigensolver failed to converge");

    Spectrum s;
    s.method = SpectrumMethod::exact_charge_basis;
    s.energies_GHz.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + k);
    for (double e : s.energies_GHz)
        if (!std::isfinite(e))
            throw SolverError("eigen_spectrum: non-finite eigenvalue");
    return s;
}

QuantumOperatorMatrix kerr_hamiltonian(double f01_GHz, double ec_GHz, int fock_dim) {
    if (fock_dim < 3)
        throw ConfigError("kerr_hamiltonian: fock_dim must be >= 3 "
                          "(two-photon physics needs at least |0>,|1>,|2>)");
    Matrix h = Matrix::Zero(fock_dim, fock_dim);
    for (int n = 0; n < fock_dim; ++n) {
        const double dn = static_cast<double>(n);
        h(n, n) = f01_GHz * dn - 0.5 * ec_GHz * dn * (dn - 1.0);
    }
    return QuantumOperatorMatrix(std::move(h), Basis::fock);
}

std::pair<QuantumOperatorMatrix, QuantumOperatorMatrix> ladder_operators(int fock_dim) {
    if (fock_dim < 2)
        throw ConfigError("ladder_operators: fock_dim must be >= 2");
    Matrix a = Matrix::Zero(fock_dim, fock_dim);
    for (int n = 1; n < fock_dim; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix ad = a.adjoint();
    return {QuantumOperatorMatrix(std::move(a), Basis::fock),
            QuantumOperatorMatrix(std::move(ad), Basis::fock)};
}

Spectrum asymptotic_spectrum(double ej_GHz, double ec_GHz, int levels) {
    if (levels < 2)
        throw ConfigError("asymptotic_spectrum: need at least 2 levels");
    Spectrum s;
    s.method = SpectrumMethod::asymptotic;
    s.energies_GHz.reserve(levels);
    for (int n = 0; n < levels; ++n)
        s.energies_GHz.push_back(eigenenergy_asymptotic(n, ej_GHz, ec_GHz));
    return s;
}

} // namespace jjr
