#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "jjr/circuit.hpp"
#include "jjr/operator_matrix.hpp"

namespace jjr {

// Dynamics works in angular units: Hamiltonians in rad/ns, collapse
// operators in sqrt(rad/ns), times in ns. The spectrum module's GHz-valued
// Hamiltonians get multiplied by 2*pi on entry (rotating_frame_hamiltonian).

enum class Port { left, right };

struct Tone {
    double f_GHz = 0.0;
    double power_aW = 0.0;
    Port port = Port::left;
};

/// One or two coherent drives.
struct DriveSpec {
    std::vector<Tone> tones;
    bool allow_equal_frequencies = false;

    void validate() const;
};

struct DensityMatrix {
    Matrix rho;
    std::optional<double> time_ns;

    int dim() const { return static_cast<int>(rho.rows()); }
    double trace_defect() const { return std::abs(rho.trace() - Complex(1.0)); }
    double hermiticity_defect() const { return (rho - rho.adjoint()).norm(); }
    double min_eigenvalue() const;
    /// Throws SolverError if the state violates the solver-tolerance bounds
    /// (hermiticity 1e-10, trace 1e-8, positivity -1e-8).
    void validate() const;
};

struct SteadyStateResult {
    DensityMatrix rho;
    Complex a_expect{0.0, 0.0};
    double n_expect = 0.0;
    double residual = 0.0;      ///< Frobenius norm of L(rho), rad/ns scale
    double top_population = 0.0;
    int fock_dim = 0;
};

struct Transmission {
    Complex t{0.0, 0.0};
    double T = 0.0;
    double R = 0.0;
};

struct SolverSettings {
    int charge_cutoff = 20;
    int fock_dim = 15;
    int max_fock_dim = 31;
    int escalation_step = 4;
    double top_pop_tol = 1e-6;          ///< truncation safety bound
    double steady_residual_tol = 1e-10;
    double ode_tol = 1e-8;              ///< local error per unit trace
    double transient_kappa_factor = 10.0;
    int window_beat_periods = 20;
    int samples_per_period = 64;
    double max_evolve_ns = 4000.0;
    double drift_tol = 1e-4;            ///< cycle-to-cycle demod drift bound
};

/// Collapse operators {sqrt(kL) a, sqrt(kR) a, sqrt(ki) a} in sqrt(rad/ns).
std::vector<Matrix> collapse_operators(const CircuitParams& p, int fock_dim);

/// Port drive amplitude eps = sqrt(kappa_c * P/(h f)) in rad/ns, normalized
/// so a linear cavity reaches <n> = 4 kc P / ((2kc+ki)^2 h f) on resonance.
double drive_amplitude(double power_aW, double f_GHz, double kappa_c_MHz);

/// Time-independent single-tone rotating-frame Hamiltonian (rad/ns):
/// 2*pi*(diag(H_kerr) - f_drive*n) + eps*(a + a^+). Rejects two-tone specs.
QuantumOperatorMatrix rotating_frame_hamiltonian(const QuantumOperatorMatrix& h_kerr_GHz,
                                                 const DriveSpec& drive, double eps_ang);

/// Steady state of L(rho) = 0 with tr(rho) = 1 via the vectorized dense
/// Liouvillian. Throws SolverError when the kernel is degenerate or the
/// residual exceeds the tolerance.
SteadyStateResult steady_state(const Matrix& h_rf_ang, const std::vector<Matrix>& collapse_ops,
                               double residual_tol = 1e-10);

/// Input-output transmission/reflection for a single-tone steady state.
/// Normalization anchors: linear on-resonance T = (2kc/(2kc+ki))^2 and
/// R = (ki/(2kc+ki))^2. Throws on zero input power.
Transmission transmission(const SteadyStateResult& ss, const CircuitParams& p,
                          double eps_ang);

struct Trajectory {
    std::vector<double> t_ns;
    std::vector<Complex> a_expect;
    std::vector<std::vector<double>> populations;
    double max_trace_defect = 0.0;
};

using HamiltonianFn = std::function<Matrix(double /*t_ns*/)>;

/// Generic dense master-equation propagation (adaptive Dormand-Prince 5(4),
/// local tolerance `tol` per unit trace). Samples <a>(t) and populations at
/// the requested times. Step-size underflow surfaces as SolverError.
Trajectory time_evolve(const HamiltonianFn& h_of_t_ang,
                       const std::vector<Matrix>& collapse_ops, const Matrix& rho0,
                       double t0_ns, double t1_ns, const std::vector<double>& sample_times,
                       double tol = 1e-8);

/// Fourier projection of <a>(t) onto exp(-i*2*pi*(f_target - f_frame)*t)
/// over the largest whole number of beat periods at or after window_start.
/// Requires >= 20 beat periods of coverage unless the target sits at the
/// frame frequency (plain average).
Complex demodulate(const Trajectory& traj, double f_target_GHz, double f_frame_GHz,
                   double window_start_ns);

/// Single-tone steady response with automatic Fock-space escalation.
struct OneToneResponse {
    Transmission tr;
    double n_expect = 0.0;
    double n_linear = 0.0;   ///< linear-resonator photon number at this drive
    int fock_dim = 0;
    bool converged = false;
};
OneToneResponse steady_one_tone(const CircuitParams& p, double f_GHz, double power_aW,
                                const SolverSettings& s);

/// Two-tone response: time evolution in the tone-1 rotating frame (diagonal
/// interaction picture inside), demodulation at the tone-2 beat frequency.
struct TwoToneResponse {
    Complex probe_amp{0.0, 0.0}; ///< demodulated <a> component at tone 2
    double probe_T = 0.0;        ///< |t|^2 at the probe frequency
    double p_out_aW = 0.0;       ///< transmitted probe power
    double drift = 0.0;
    double top_population = 0.0;
    int fock_dim = 0;
    bool converged = false;
};
TwoToneResponse two_tone_response(const CircuitParams& p, const Tone& pump,
                                  const Tone& probe, const SolverSettings& s);

/// Transmitted power (aW) carried by an output-port amplitude component.
double output_power_aW(double kappa_out_ang, double f_GHz, Complex amplitude);

} // namespace jjr
