#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "jjr/errors.hpp"

namespace jjr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

enum class Basis { charge, fock };

inline const char* basis_name(Basis b) {
    return b == Basis::charge ? "charge" : "fock";
}

/// Dense complex operator on a truncated charge or Fock basis.
struct QuantumOperatorMatrix {
    Matrix entries;
    Basis basis_tag = Basis::fock;

    QuantumOperatorMatrix() = default;
    QuantumOperatorMatrix(Matrix m, Basis b) : entries(std::move(m)), basis_tag(b) {
        if (entries.rows() != entries.cols())
            throw SolverError("QuantumOperatorMatrix: matrix must be square");
    }

    int dim() const { return static_cast<int>(entries.rows()); }

    /// Relative Frobenius distance from the Hermitian part.
    double hermiticity_defect() const {
        const double norm = entries.norm();
        if (norm == 0.0) return 0.0;
        return (entries - entries.adjoint()).norm() / norm;
    }

    bool is_hermitian(double rel_tol = 1e-12) const {
        return hermiticity_defect() <= rel_tol;
    }

    void require_same_basis(const QuantumOperatorMatrix& other) const {
        if (basis_tag != other.basis_tag)
            throw SolverError(std::string("basis mismatch: ") + basis_name(basis_tag) +
                              " vs " + basis_name(other.basis_tag));
    }
};

} // namespace jjr
