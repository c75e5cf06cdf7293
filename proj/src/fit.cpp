#include "jjr/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>
#include <sstream>

namespace jjr {

void Trace::validate() const {
    if (x_GHz.size() != y.size() || x_GHz.size() < 3)
        throw ConfigError("Trace: x and y must have equal length >= 3");
    if (!sigma.empty() && sigma.size() != x_GHz.size())
        throw ConfigError("Trace: sigma length mismatch");
    for (std::size_t i = 1; i < x_GHz.size(); ++i)
        if (!(x_GHz[i] > x_GHz[i - 1]))
            throw ConfigError("Trace: frequencies must be strictly increasing");
    for (double v : y)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ConfigError("Trace: values must be finite and >= 0");
    for (double s : sigma)
        if (!(s > 0.0))
            throw ConfigError("Trace: sigma values must be > 0");
}

namespace detail {

LmOutcome levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    Eigen::VectorXd x0, int max_iterations, double xtol, double ftol, double gtol) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    const int np = static_cast<int>(x0.size());
    VectorXd x = std::move(x0);
    VectorXd r = residuals(x);
    const int m = static_cast<int>(r.size());
    if (m < np)
        throw ConfigError("levenberg_marquardt: fewer residuals than parameters");
    double cost = r.squaredNorm();

    auto jacobian = [&](const VectorXd& xc) {
        MatrixXd jac(m, np);
        for (int j = 0; j < np; ++j) {
            const double step = std::max(1e-7 * std::abs(xc(j)), 1e-9);
            VectorXd xp = xc, xm = xc;
            xp(j) += step;
            xm(j) -= step;
            jac.col(j) = (residuals(xp) - residuals(xm)) / (2.0 * step);
        }
        return jac;
    };

    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    MatrixXd jac = jacobian(x);
    for (; iter < max_iterations; ++iter) {
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd g = jac.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < gtol) {
            converged = true;
            break;
        }
        MatrixXd damped = jtj;
        for (int d = 0; d < np; ++d)
            damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
        const VectorXd delta = damped.ldlt().solve(-g);
        const VectorXd x_try = x + delta;
        const VectorXd r_try = residuals(x_try);
        const double cost_try = r_try.squaredNorm();
        if (cost_try < cost) {
            const double dcost = cost - cost_try;
            const double dx = delta.norm() / std::max(1.0, x.norm());
            x = x_try;
            r = r_try;
            cost = cost_try;
            lambda = std::max(lambda / 3.0, 1e-14);
            jac = jacobian(x);
            if (dx < xtol || dcost < ftol * std::max(cost, 1e-300)) {
                converged = true;
                ++iter;
                break;
            }
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
    }

    LmOutcome out;
    out.x = x;
    out.iterations = iter;
    out.converged = converged;
    out.residual_rms = std::sqrt(cost / m);
    MatrixXd jtj = jac.transpose() * jac;
    const double dof = std::max(1, m - np);
    const double s2 = cost / dof;
    Eigen::LDLT<MatrixXd> ldlt(jtj);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        out.covariance = s2 * ldlt.solve(MatrixXd::Identity(np, np));
        out.covariance = 0.5 * (out.covariance + out.covariance.transpose().eval());
    } else {
        out.covariance = MatrixXd::Constant(np, np, std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

} // namespace detail

namespace {

double lineshape_value(LineshapeKind kind, double f, double f0, double kc_MHz,
                       double ki_MHz, double amp) {
    const double kt_GHz = (2.0 * kc_MHz + ki_MHz) * 1e-3;
    const double hw = 0.5 * kt_GHz; // FWHM kt/2pi in ordinary frequency -> half width
    const double d = f - f0;
    const double denom = d * d + hw * hw;
    if (kind == LineshapeKind::transmission) {
        const double t0 = 4.0 * kc_MHz * kc_MHz / ((2.0 * kc_MHz + ki_MHz) * (2.0 * kc_MHz + ki_MHz));
        return amp * t0 * hw * hw / denom;
    }
    const double hi = 0.5 * ki_MHz * 1e-3;
    return amp * (d * d + hi * hi) / denom;
}

struct InitialGuess {
    double f0, kc_MHz, ki_MHz, fwhm_GHz;
};

InitialGuess guess_from_trace(const Trace& tr, LineshapeKind kind) {
    const std::size_t n = tr.x_GHz.size();
    std::size_t i_ext = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const bool better = kind == LineshapeKind::transmission ? tr.y[i] > tr.y[i_ext]
                                                                : tr.y[i] < tr.y[i_ext];
        if (better) i_ext = i;
    }
    const double f0 = tr.x_GHz[i_ext];

    // half-crossing width of the peak (transmission) or the dip (reflection)
    double baseline = kind == LineshapeKind::transmission
                          ? 0.0
                          : std::max(tr.y.front(), tr.y.back());
    const double extreme = tr.y[i_ext];
    const double half = 0.5 * (extreme + baseline);
    double left = tr.x_GHz.front(), right = tr.x_GHz.back();
    for (std::size_t i = i_ext; i-- > 0;) {
        const bool crossed = kind == LineshapeKind::transmission ? tr.y[i] < half
                                                                 : tr.y[i] > half;
        if (crossed) {
            left = tr.x_GHz[i];
            break;
        }
    }
    for (std::size_t i = i_ext + 1; i < n; ++i) {
        const bool crossed = kind == LineshapeKind::transmission ? tr.y[i] < half
                                                                 : tr.y[i] > half;
        if (crossed) {
            right = tr.x_GHz[i];
            break;
        }
    }
    double fwhm = std::max(right - left, (tr.x_GHz.back() - tr.x_GHz.front()) / (n - 1.0));

    InitialGuess g;
    g.f0 = f0;
    g.fwhm_GHz = fwhm;
    const double kt_MHz = fwhm * 1e3;
    if (kind == LineshapeKind::transmission) {
        const double t0 = std::clamp(extreme, 1e-6, 1.0);
        g.kc_MHz = 0.5 * std::sqrt(t0) * kt_MHz;
        g.ki_MHz = std::max(kt_MHz - 2.0 * g.kc_MHz, 1e-3 * kt_MHz);
    } else {
        const double r0 = std::clamp(extreme, 0.0, 1.0);
        g.ki_MHz = std::max(std::sqrt(r0) * kt_MHz, 1e-3 * kt_MHz);
        g.kc_MHz = std::max(0.5 * (kt_MHz - g.ki_MHz), 1e-3 * kt_MHz);
    }
    return g;
}

} // namespace

FitResult fit_lorentzian(const Trace& trace, LineshapeKind kind, bool free_amplitude) {
    trace.validate();
    const InitialGuess g = guess_from_trace(trace, kind);
    if (trace.x_GHz.back() - trace.x_GHz.front() < 3.0 * g.fwhm_GHz)
        throw ConfigError("fit_lorentzian: trace spans fewer than 3 linewidths");

    const int np = free_amplitude ? 4 : 3;
    Eigen::VectorXd x0(np);
    x0(0) = g.f0;
    x0(1) = g.kc_MHz;
    x0(2) = g.ki_MHz;
    if (free_amplitude) x0(3) = 1.0;

    auto residuals = [&](const Eigen::VectorXd& x) {
        const double amp = free_amplitude ? x(3) : 1.0;
        Eigen::VectorXd r(trace.x_GHz.size());
        for (std::size_t i = 0; i < trace.x_GHz.size(); ++i) {
            const double model =
                lineshape_value(kind, trace.x_GHz[i], x(0), x(1), x(2), amp);
            double w = trace.sigma.empty() ? 1.0 : trace.sigma[i];
            r(static_cast<int>(i)) = (model - trace.y[i]) / w;
        }
        return r;
    };

    const detail::LmOutcome lm = detail::levenberg_marquardt(residuals, x0);
    if (!lm.converged)
        throw SolverError("fit_lorentzian: no convergence within the iteration budget");

    FitResult out;
    out.param_names = {"f01_GHz", "kappa_c_MHz", "kappa_i_MHz"};
    out.params["f01_GHz"] = lm.x(0);
    out.params["kappa_c_MHz"] = std::abs(lm.x(1));
    out.params["kappa_i_MHz"] = std::abs(lm.x(2));
    out.params["amplitude"] = free_amplitude ? lm.x(3) : 1.0;
    if (free_amplitude) out.param_names.push_back("amplitude");
    out.covariance = lm.covariance;
    out.residual_rms = lm.residual_rms;
    out.converged = lm.converged;
    out.iterations = lm.iterations;
    return out;
}

FluxArcFit fit_flux_arc(const std::vector<std::pair<double, double>>& pts,
                        std::optional<double> ec_fixed, bool fit_asymmetry) {
    if (pts.size() < 5)
        throw ConfigError("fit_flux_arc: need at least 5 (flux, f01) points");
    double flux_min = pts[0].first, flux_max = pts[0].first;
    double cos_min = 1.0, cos_max = 0.0;
    for (const auto& [flux, f01] : pts) {
        if (!(f01 > 0.0))
            throw ConfigError("fit_flux_arc: f01 values must be > 0");
        flux_min = std::min(flux_min, flux);
        flux_max = std::max(flux_max, flux);
        const double ac = std::abs(std::cos(pi * flux));
        cos_min = std::min(cos_min, ac);
        cos_max = std::max(cos_max, ac);
    }
    if (flux_max - flux_min < 0.3)
        throw ConfigError("fit_flux_arc: points must span at least 0.3 flux quanta");
    if (cos_max - cos_min < 1e-9)
        throw ConfigError("fit_flux_arc: degenerate geometry, all points share one "
                          "|cos(pi*flux)| value");

    // parameter vector: [EJ_max, (Ec), (d)]
    const int np = 1 + (ec_fixed ? 0 : 1) + (fit_asymmetry ? 1 : 0);
    auto unpack = [&](const Eigen::VectorXd& x) {
        double ej_max = x(0);
        double ec = ec_fixed ? *ec_fixed : x(1);
        double d = fit_asymmetry ? x(np - 1) : 0.0;
        return std::tuple<double, double, double>(ej_max, ec, d);
    };
    auto residuals = [&](const Eigen::VectorXd& x) {
        const auto [ej_max, ec, d] = unpack(x);
        Eigen::VectorXd r(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double c = std::cos(pi * pts[i].first);
            const double sn = std::sin(pi * pts[i].first);
            const double ej = std::abs(ej_max) * std::sqrt(c * c + d * d * sn * sn);
            const double f01 = std::sqrt(8.0 * std::max(ej, 1e-12) * std::abs(ec)) - std::abs(ec);
            r(static_cast<int>(i)) = f01 - pts[i].second;
        }
        return r;
    };

    // seed EJ_max from the largest-|cos| point assuming a plausible Ec
    const double ec_seed = ec_fixed ? *ec_fixed : 0.3;
    double f01_at_max = 0.0;
    for (const auto& [flux, f01] : pts)
        if (std::abs(std::cos(pi * flux)) > cos_max - 1e-12) f01_at_max = f01;
    const double ej_seed =
        (f01_at_max + ec_seed) * (f01_at_max + ec_seed) / (8.0 * ec_seed) / std::max(cos_max, 1e-6);

    Eigen::VectorXd x0(np);
    x0(0) = ej_seed;
    int idx = 1;
    if (!ec_fixed) x0(idx++) = ec_seed;
    if (fit_asymmetry) x0(idx) = 0.01;

    const detail::LmOutcome lm = detail::levenberg_marquardt(residuals, x0);
    if (!lm.converged)
        throw SolverError("fit_flux_arc: no convergence");

    FluxArcFit out;
    const auto [ej_max, ec, d] = unpack(lm.x);
    out.ej_max_GHz = std::abs(ej_max);
    out.ec_GHz = std::abs(ec);
    out.asymmetry_d = std::abs(d);
    out.detail.param_names = {"EJ_max_GHz"};
    out.detail.params["EJ_max_GHz"] = out.ej_max_GHz;
    if (!ec_fixed) {
        out.detail.param_names.push_back("Ec_GHz");
        out.detail.params["Ec_GHz"] = out.ec_GHz;
    }
    if (fit_asymmetry) {
        out.detail.param_names.push_back("asymmetry_d");
        out.detail.params["asymmetry_d"] = out.asymmetry_d;
    }
    out.detail.covariance = lm.covariance;
    out.detail.residual_rms = lm.residual_rms;
    out.detail.converged = lm.converged;
    out.detail.iterations = lm.iterations;
    return out;
}

KerrEstimate extract_kerr(const ScanResult& map, double f01_GHz, double guard_linewidths,
                          double min_prominence) {
    if (map.nx() < 1 || map.ny() < 3)
        throw ConfigError("extract_kerr: map needs a probe-frequency axis with >= 3 points");
    const double lw_GHz = (2.0 * map.circuit.kappa_c_MHz + map.circuit.kappa_i_MHz) * 1e-3;
    const double f2_cap = f01_GHz - guard_linewidths * lw_GHz;

    bool any_pump_on = false;
    for (double p1 : map.grid.x.values)
        any_pump_on |= p1 > 0.0;
    if (!any_pump_on)
        throw SolverError("extract_kerr: no probe peak (map has no pump-on rows)");

    const auto features = detect_features(map, FeatureKind::peak, 1, min_prominence);
    const Feature* best = nullptr;
    for (const Feature& f : features) {
        if (!(f.x > 0.0)) continue;            // pump-off row
        if (f.y >= f2_cap) continue;           // too close to the main line
        if (!best || f.prominence > best->prominence) best = &f;
    }
    if (!best)
        throw SolverError("extract_kerr: no probe peak below the guard band; pump "
                          "power may be under the bleaching threshold everywhere");

    KerrEstimate est;
    est.peak_f2_GHz = best->y;
    est.ec_GHz = f01_GHz - best->y;
    est.pump_power_aW = best->x;
    const auto& f2 = map.grid.y.values;
    double step = f2.size() > 1 ? (f2.back() - f2.front()) / (f2.size() - 1.0) : 0.0;
    est.uncertainty_GHz = 0.5 * step;
    return est;
}

} // namespace jjr
