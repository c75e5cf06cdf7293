#include "jjr/spectroscopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "jjr/thread_pool.hpp"

namespace jjr {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

CellValue failed_cell() {
    CellValue c;
    c.amp = Complex(kNaN, kNaN);
    c.T = kNaN;
    c.p_out_aW = kNaN;
    c.aux = kNaN;
    c.converged = false;
    return c;
}

int count_unconverged(const std::vector<CellValue>& cells) {
    int n = 0;
    for (const auto& c : cells)
        if (!c.converged) ++n;
    return n;
}

} // namespace

void AxisSpec::validate() const {
    if (values.empty())
        throw ConfigError("axis '" + name + "': no values");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw ConfigError("axis '" + name + "': values must be strictly increasing");
}

void ScanGrid::validate(std::size_t min_cells) const {
    x.validate();
    y.validate();
    if (x.values.size() * y.values.size() < min_cells)
        throw ConfigError("scan grid too small");
}

ScanResult one_tone_map(const CircuitParams& p, const std::vector<double>& f_GHz,
                        const std::vector<double>& power_aW, const SolverSettings& s,
                        int threads) {
    ScanResult r;
    r.grid.x = AxisSpec{"f_GHz", "GHz", f_GHz};
    r.grid.y = AxisSpec{"P_aW", "aW", power_aW};
    r.grid.x.validate();
    r.grid.y.validate();
    r.aux_name = "n_linear";
    r.circuit = p;
    r.solver = s;
    r.cells.assign(r.nx() * r.ny(), CellValue{});

    parallel_for(r.cells.size(), threads, [&](std::size_t i) {
        const double f = f_GHz[i / r.ny()];
        const double pw = power_aW[i % r.ny()];
        try {
            const OneToneResponse resp = steady_one_tone(p, f, pw, s);
            CellValue c;
            c.amp = resp.tr.t;
            c.T = resp.tr.T;
            c.p_out_aW = resp.tr.T * pw;
            c.aux = resp.n_linear;
            c.converged = resp.converged;
            c.fock_dim = resp.fock_dim;
            r.cells[i] = c;
        } catch (const SolverError&) {
            r.cells[i] = failed_cell();
        }
    });
    r.failed_cells = count_unconverged(r.cells);
    return r;
}

std::vector<SaturationPoint> saturation_curve(const CircuitParams& p, double f_GHz,
                                              const std::vector<double>& power_aW,
                                              const SolverSettings& s, int threads) {
    AxisSpec{"P_aW", "aW", power_aW}.validate();
    std::vector<SaturationPoint> curve(power_aW.size());
    parallel_for(curve.size(), threads, [&](std::size_t i) {
        SaturationPoint pt;
        pt.p_in_aW = power_aW[i];
        try {
            const OneToneResponse resp = steady_one_tone(p, f_GHz, power_aW[i], s);
            pt.T = resp.tr.T;
            pt.p_out_aW = resp.tr.T * power_aW[i];
            pt.converged = resp.converged;
        } catch (const SolverError&) {
            pt.T = kNaN;
            pt.p_out_aW = kNaN;
        }
        curve[i] = pt;
    });
    return curve;
}

double saturation_plateau_aW(const std::vector<SaturationPoint>& curve) {
    if (curve.empty())
        throw ConfigError("saturation_plateau_aW: empty curve");
    const double p_max = curve.back().p_in_aW;
    std::vector<double> band;
    for (const auto& pt : curve)
        if (pt.converged && pt.p_in_aW >= 0.1 * p_max)
            band.push_back(pt.p_out_aW);
    if (band.empty())
        throw SolverError("saturation_plateau_aW: no converged points in the top decade");
    std::sort(band.begin(), band.end());
    const std::size_t n = band.size();
    return n % 2 == 1 ? band[n / 2] : 0.5 * (band[n / 2 - 1] + band[n / 2]);
}

ScanResult two_tone_map(const CircuitParams& p, double f1_GHz,
                        const std::vector<double>& p1_aW, const std::vector<double>& f2_GHz,
                        double p2_aW, const SolverSettings& s, int threads) {
    ScanResult r;
    r.grid.x = AxisSpec{"P1_aW", "aW", p1_aW};
    r.grid.y = AxisSpec{"f2_GHz", "GHz", f2_GHz};
    r.grid.x.validate();
    r.grid.y.validate();
    r.grid.fixed = {{"f1_GHz", f1_GHz}, {"P2_aW", p2_aW}};
    r.aux_name = "T_pump_off";
    r.circuit = p;
    r.solver = s;
    r.cells.assign(r.nx() * r.ny(), CellValue{});

    // pump-off reference: single-tone probe response per probe frequency
    std::vector<double> pump_off(f2_GHz.size(), kNaN);
    parallel_for(f2_GHz.size(), threads, [&](std::size_t iy) {
        try {
            pump_off[iy] = steady_one_tone(p, f2_GHz[iy], p2_aW, s).tr.T;
        } catch (const SolverError&) {
        }
    });

    parallel_for(r.cells.size(), threads, [&](std::size_t i) {
        const double p1 = p1_aW[i / r.ny()];
        const std::size_t iy = i % r.ny();
        const double f2 = f2_GHz[iy];
        try {
            CellValue c = [&]() -> CellValue {
                CellValue cv;
                if (std::abs(f2 - f1_GHz) < 1e-9) {
                    cv = failed_cell();
                    return cv;
                }
                const TwoToneResponse resp = two_tone_response(
                    p, Tone{f1_GHz, p1, Port::left}, Tone{f2, p2_aW, Port::left}, s);
                cv.amp = Complex(0.0, -1.0) * p.kappa_c_ang() * resp.probe_amp /
                         drive_amplitude(p2_aW, f2, p.kappa_c_MHz);
                cv.T = resp.probe_T;
                cv.p_out_aW = resp.p_out_aW;
                cv.converged = resp.converged;
                cv.fock_dim = resp.fock_dim;
                return cv;
            }();
            c.aux = pump_off[iy];
            r.cells[i] = c;
        } catch (const SolverError&) {
            r.cells[i] = failed_cell();
            r.cells[i].aux = pump_off[iy];
        }
    });
    r.failed_cells = count_unconverged(r.cells);
    return r;
}

ScanResult power_power_map(const CircuitParams& p, double f1_GHz, double f2_GHz,
                           const std::vector<double>& p1_aW,
                           const std::vector<double>& p2_aW, const SolverSettings& s,
                           int threads) {
    if (std::abs(f1_GHz - f2_GHz) < 1e-9)
        throw ConfigError("power_power_map: tone frequencies must differ");
    ScanResult r;
    r.grid.x = AxisSpec{"P1_aW", "aW", p1_aW};
    r.grid.y = AxisSpec{"P2_aW", "aW", p2_aW};
    r.grid.x.validate();
    r.grid.y.validate();
    r.grid.fixed = {{"f1_GHz", f1_GHz}, {"f2_GHz", f2_GHz}};
    r.circuit = p;
    r.solver = s;
    r.cells.assign(r.nx() * r.ny(), CellValue{});

    parallel_for(r.cells.size(), threads, [&](std::size_t i) {
        const double p1 = p1_aW[i / r.ny()];
        const double p2 = p2_aW[i % r.ny()];
        try {
            const TwoToneResponse resp = two_tone_response(
                p, Tone{f1_GHz, p1, Port::left}, Tone{f2_GHz, p2, Port::left}, s);
            CellValue c;
            c.amp = Complex(0.0, -1.0) * p.kappa_c_ang() * resp.probe_amp /
                    drive_amplitude(p2, f2_GHz, p.kappa_c_MHz);
            c.T = resp.probe_T;
            c.p_out_aW = resp.p_out_aW;
            c.converged = resp.converged;
            c.fock_dim = resp.fock_dim;
            r.cells[i] = c;
        } catch (const SolverError&) {
            r.cells[i] = failed_cell();
        }
    });
    r.failed_cells = count_unconverged(r.cells);
    return r;
}

ScanResult energy_diagram(const CircuitParams& p, const std::vector<double>& f1_GHz,
                          const std::vector<double>& f2_GHz, double p1_aW, double p2_aW,
                          const SolverSettings& s, int threads, bool allow_equal) {
    ScanResult r;
    r.grid.x = AxisSpec{"f1_GHz", "GHz", f1_GHz};
    r.grid.y = AxisSpec{"f2_GHz", "GHz", f2_GHz};
    r.grid.x.validate();
    r.grid.y.validate();
    r.grid.fixed = {{"P1_aW", p1_aW}, {"P2_aW", p2_aW}};
    r.circuit = p;
    r.solver = s;
    r.cells.assign(r.nx() * r.ny(), CellValue{});
    std::atomic<int> skipped{0};

    parallel_for(r.cells.size(), threads, [&](std::size_t i) {
        const double f1 = f1_GHz[i / r.ny()];
        const double f2 = f2_GHz[i % r.ny()];
        const bool equal = std::abs(f2 - f1) < 1e-9;
        try {
            if (equal && !allow_equal) {
                r.cells[i] = failed_cell();
                skipped.fetch_add(1);
                return;
            }
            CellValue c;
            if (equal) {
                // combined single tone; both sources add in phase
                const double eps1 = drive_amplitude(p1_aW, f1, p.kappa_c_MHz);
                const double eps2 = drive_amplitude(p2_aW, f2, p.kappa_c_MHz);
                const double p_tot =
                    power_aW_from_flux((eps1 + eps2) * (eps1 + eps2) / p.kappa_c_ang(), f1);
                const OneToneResponse resp = steady_one_tone(p, f1, p_tot, s);
                c.amp = resp.tr.t;
                c.T = resp.tr.T;
                c.p_out_aW = resp.tr.T * p_tot;
                c.converged = resp.converged;
                c.fock_dim = resp.fock_dim;
            } else {
                const TwoToneResponse resp = two_tone_response(
                    p, Tone{f1, p1_aW, Port::left}, Tone{f2, p2_aW, Port::left}, s);
                c.amp = Complex(0.0, -1.0) * p.kappa_c_ang() * resp.probe_amp /
                        drive_amplitude(p2_aW, f2, p.kappa_c_MHz);
                c.T = resp.probe_T;
                c.p_out_aW = resp.p_out_aW;
                c.converged = resp.converged;
                c.fock_dim = resp.fock_dim;
            }
            r.cells[i] = c;
        } catch (const SolverError&) {
            r.cells[i] = failed_cell();
        }
    });
    r.skipped_cells = skipped.load();
    r.failed_cells = count_unconverged(r.cells) - r.skipped_cells;
    return r;
}

std::vector<LineOrder> standard_line_orders() {
    return {LineOrder{1, 0, 0, 1}, LineOrder{1, 0, 1, 2}, LineOrder{1, 1, 0, 2},
            LineOrder{2, 1, 0, 3}};
}

std::vector<ConservationLine> conservation_lines(const Spectrum& sp,
                                                 const std::vector<LineOrder>& orders,
                                                 double f_min_GHz, double f_max_GHz,
                                                 int samples_per_line) {
    if (sp.levels() < 4)
        throw ConfigError("conservation_lines: spectrum needs at least 4 levels");
    if (!(f_max_GHz > f_min_GHz))
        throw ConfigError("conservation_lines: empty frequency window");
    if (samples_per_line < 2)
        throw ConfigError("conservation_lines: need at least 2 samples per line");

    std::vector<ConservationLine> lines;
    lines.reserve(orders.size());
    for (const LineOrder& o : orders) {
        if (o.level_i == o.level_j)
            throw ConfigError("conservation_lines: zero-energy transition (i == j)");
        if (o.level_i < 0 || o.level_j >= sp.levels() || o.level_j < o.level_i)
            throw ConfigError("conservation_lines: need 0 <= i < j < levels");
        if (o.m < 0 || o.k < 0 || o.m + o.k < 1)
            throw ConfigError("conservation_lines: invalid photon orders");

        ConservationLine line;
        line.order = o;
        line.energy_GHz = sp.gap(o.level_i, o.level_j);
        const double step = (f_max_GHz - f_min_GHz) / (samples_per_line - 1);
        if (o.k == 0) {
            const double f1 = line.energy_GHz / o.m;
            if (f1 >= f_min_GHz && f1 <= f_max_GHz)
                for (int i = 0; i < samples_per_line; ++i)
                    line.locus.emplace_back(f1, f_min_GHz + i * step);
        } else {
            for (int i = 0; i < samples_per_line; ++i) {
                const double f1 = f_min_GHz + i * step;
                const double f2 = (line.energy_GHz - o.m * f1) / o.k;
                if (f2 >= f_min_GHz && f2 <= f_max_GHz)
                    line.locus.emplace_back(f1, f2);
            }
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

namespace {

struct LinePeak {
    int index = 0;
    double prominence = 0.0;
};

// Classic 1-D prominence: walk outward until terrain exceeds the peak,
// track the minima, take the higher of the two bases.
std::vector<LinePeak> line_peaks(const std::vector<double>& v) {
    std::vector<LinePeak> peaks;
    const int n = static_cast<int>(v.size());
    for (int i = 1; i + 1 < n; ++i) {
        if (std::isnan(v[i]) || std::isnan(v[i - 1]) || std::isnan(v[i + 1])) continue;
        if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
        double left_min = v[i];
        for (int j = i - 1; j >= 0 && !std::isnan(v[j]); --j) {
            if (v[j] > v[i]) break;
            left_min = std::min(left_min, v[j]);
        }
        double right_min = v[i];
        for (int j = i + 1; j < n && !std::isnan(v[j]); ++j) {
            if (v[j] > v[i]) break;
            right_min = std::min(right_min, v[j]);
        }
        peaks.push_back(LinePeak{i, v[i] - std::max(left_min, right_min)});
    }
    return peaks;
}

// Parabolic refinement in index space, mapped back through the axis grid.
double subpixel_coordinate(const std::vector<double>& axis, const std::vector<double>& v,
                           int i) {
    const double denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
    double off = 0.0;
    if (std::abs(denom) > 1e-300)
        off = 0.5 * (v[i - 1] - v[i + 1]) / denom;
    off = std::clamp(off, -0.5, 0.5);
    if (off >= 0.0)
        return axis[i] + off * (axis[i + 1] - axis[i]);
    return axis[i] + off * (axis[i] - axis[i - 1]);
}

} // namespace

std::vector<Feature> detect_features(const ScanResult& r, FeatureKind kind, int axis,
                                     double prominence_threshold) {
    if (axis < 0)
        axis = r.ny() > 1 ? 1 : 0;
    if (axis != 0 && axis != 1)
        throw ConfigError("detect_features: axis must be 0 or 1");

    const double sign = kind == FeatureKind::peak ? 1.0 : -1.0;

    if (prominence_threshold < 0.0) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const CellValue& c : r.cells)
            if (c.converged && std::isfinite(c.T)) {
                lo = std::min(lo, c.T);
                hi = std::max(hi, c.T);
            }
        if (!(hi > lo))
            return {};
        prominence_threshold = 0.05 * (hi - lo);
    }

    const std::vector<double>& scan_axis = axis == 1 ? r.grid.y.values : r.grid.x.values;
    const std::vector<double>& line_axis = axis == 1 ? r.grid.x.values : r.grid.y.values;
    const std::size_t n_lines = axis == 1 ? r.nx() : r.ny();
    const std::size_t n_scan = axis == 1 ? r.ny() : r.nx();

    std::vector<Feature> out;
    std::vector<double> v(n_scan);
    for (std::size_t li = 0; li < n_lines; ++li) {
        for (std::size_t si = 0; si < n_scan; ++si) {
            const CellValue& c = axis == 1 ? r.at(li, si) : r.at(si, li);
            v[si] = c.converged && std::isfinite(c.T) ? sign * c.T : kNaN;
        }
        for (const LinePeak& pk : line_peaks(v)) {
            if (pk.prominence < prominence_threshold) continue;
            Feature f;
            f.x = line_axis[li];
            f.y = subpixel_coordinate(scan_axis, v, pk.index);
            f.prominence = pk.prominence;
            out.push_back(f);
        }
    }
    std::sort(out.begin(), out.end(), [](const Feature& a, const Feature& b) {
        if (a.prominence != b.prominence) return a.prominence > b.prominence;
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    return out;
}

} // namespace jjr
