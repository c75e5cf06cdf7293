#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jjr/spectroscopy.hpp"

namespace jjr {

/// Measured or simulated trace: frequency vs T or R, optional per-point
/// uncertainty used as least-squares weights.
struct Trace {
    std::vector<double> x_GHz;
    std::vector<double> y;
    std::vector<double> sigma; ///< empty = unweighted

    void validate() const;
};

struct FitResult {
    std::vector<std::string> param_names;
    std::map<std::string, double> params;
    Eigen::MatrixXd covariance; ///< ordered like param_names
    double residual_rms = 0.0;
    bool converged = false;
    int iterations = 0;
};

enum class LineshapeKind { transmission, reflection };

/// Nonlinear least-squares fit of the input-output lineshape
///   T(f) = A * (2kc/kt)^2 * (kt/4pi)^2 / ((f-f0)^2 + (kt/4pi)^2)
///   R(f) = A * ((f-f0)^2 + (ki/4pi)^2) / ((f-f0)^2 + (kt/4pi)^2)
/// with kt = 2*kappa_c + kappa_i. The amplitude stays pinned at 1 unless
/// free_amplitude is set: with the amplitude free, a transmission-only
/// trace cannot separate kappa_c from kappa_i (only A*kc^2 and kt are
/// identifiable), so leave it pinned for rate extraction.
FitResult fit_lorentzian(const Trace& trace, LineshapeKind kind,
                         bool free_amplitude = false);

struct FluxArcFit {
    double ej_max_GHz = 0.0;
    double ec_GHz = 0.0;
    double asymmetry_d = 0.0;
    FitResult detail;
};

/// Least-squares inversion of f01(flux) through the SQUID relation.
/// `ec_fixed` pins the charging energy (e.g. to the two-tone value);
/// `fit_asymmetry` frees the junction asymmetry d.
FluxArcFit fit_flux_arc(const std::vector<std::pair<double, double>>& flux_f01_points,
                        std::optional<double> ec_fixed, bool fit_asymmetry = false);

struct KerrEstimate {
    double ec_GHz = 0.0;
    double uncertainty_GHz = 0.0; ///< half a probe-frequency grid step
    double peak_f2_GHz = 0.0;
    double pump_power_aW = 0.0;   ///< pump power of the row the peak sits on
};

/// Charging energy from a pump-probe map: Ec = f01 - argmax_f2(probe T),
/// searching pump-on rows below f01 minus `guard_linewidths` linewidths.
/// Throws SolverError("no probe peak...") when no row shows a peak, e.g.
/// when the pump never reaches the bleaching regime or the resonator is
/// linear.
KerrEstimate extract_kerr(const ScanResult& two_tone_map, double f01_GHz,
                          double guard_linewidths = 3.0,
                          double min_prominence = 1e-4);

namespace detail {

/// Damped Gauss-Newton (Levenberg-Marquardt) with a numerically
/// differenced Jacobian. Exposed for tests.
struct LmOutcome {
    Eigen::VectorXd x;
    Eigen::MatrixXd covariance;
    double residual_rms = 0.0;
    bool converged = false;
    int iterations = 0;
};

LmOutcome levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    Eigen::VectorXd x0, int max_iterations = 200, double xtol = 1e-12,
    double ftol = 1e-14, double gtol = 1e-10);

} // namespace detail

} // namespace jjr
