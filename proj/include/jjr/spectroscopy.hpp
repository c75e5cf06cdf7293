#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jjr/dynamics.hpp"
#include "jjr/spectrum.hpp"

namespace jjr {

struct AxisSpec {
    std::string name;
    std::string unit;
    std::vector<double> values;

    void validate() const; // strictly monotone, non-empty
};

struct ScanGrid {
    AxisSpec x, y;
    std::map<std::string, double> fixed;

    void validate(std::size_t min_cells = 4) const;
};

struct CellValue {
    Complex amp{0.0, 0.0};   ///< complex transmission amplitude (probe channel)
    double T = 0.0;
    double p_out_aW = 0.0;
    double aux = 0.0;        ///< meaning given by ScanResult::aux_name
    bool converged = false;
    int fock_dim = 0;
};

/// Rectangular scan of complex transmission amplitudes, x-major storage.
struct ScanResult {
    ScanGrid grid;
    std::vector<CellValue> cells;
    std::string aux_name;    ///< empty when the aux column is unused
    int failed_cells = 0;    ///< solver failures
    int skipped_cells = 0;   ///< skipped equal-frequency cells
    CircuitParams circuit;   ///< parameters the scan was run with
    SolverSettings solver;

    std::size_t nx() const { return grid.x.values.size(); }
    std::size_t ny() const { return grid.y.values.size(); }
    const CellValue& at(std::size_t ix, std::size_t iy) const {
        return cells[ix * ny() + iy];
    }
    CellValue& at(std::size_t ix, std::size_t iy) { return cells[ix * ny() + iy]; }
};

/// Fig-2a-style map: transmission vs drive frequency (x) and power (y).
/// aux column carries the linear-resonator <n> for each cell.
ScanResult one_tone_map(const CircuitParams& p, const std::vector<double>& f_GHz,
                        const std::vector<double>& power_aW, const SolverSettings& s,
                        int threads = 0);

struct SaturationPoint {
    double p_in_aW = 0.0;
    double p_out_aW = 0.0;  ///< coherent transmitted power kR*hf*|<a>|^2
    double T = 0.0;
    bool converged = false;
};

/// On-resonance output power vs input power (Fig 2c).
std::vector<SaturationPoint> saturation_curve(const CircuitParams& p, double f_GHz,
                                              const std::vector<double>& power_aW,
                                              const SolverSettings& s, int threads = 0);

/// Plateau level of a saturation curve: median of P_out over the top decade
/// of inputs (or the whole curve if it spans less than a decade).
double saturation_plateau_aW(const std::vector<SaturationPoint>& curve);

/// Fig-2d-style pump-probe map: x = pump power, y = probe frequency. The
/// pump frequency and probe power stay fixed. aux carries the pump-off
/// probe transmission for the cell's probe frequency.
ScanResult two_tone_map(const CircuitParams& p, double f1_GHz,
                        const std::vector<double>& p1_aW, const std::vector<double>& f2_GHz,
                        double p2_aW, const SolverSettings& s, int threads = 0);

/// Fig-2f-style map: probe output power vs the two drive powers.
ScanResult power_power_map(const CircuitParams& p, double f1_GHz, double f2_GHz,
                           const std::vector<double>& p1_aW,
                           const std::vector<double>& p2_aW, const SolverSettings& s,
                           int threads = 0);

/// Fig-3b/c-style energy diagram: probe transmission vs both frequencies at
/// fixed powers. Equal-frequency cells are skipped unless allow_equal is
/// set, in which case they are evaluated as a single combined tone.
ScanResult energy_diagram(const CircuitParams& p, const std::vector<double>& f1_GHz,
                          const std::vector<double>& f2_GHz, double p1_aW, double p2_aW,
                          const SolverSettings& s, int threads = 0,
                          bool allow_equal = false);

struct LineOrder {
    int m = 1;       ///< photons taken from tone 1
    int k = 1;       ///< photons taken from tone 2
    int level_i = 0; ///< initial level
    int level_j = 1; ///< final level
};

struct ConservationLine {
    LineOrder order;
    double energy_GHz = 0.0; ///< E_j - E_i
    std::vector<std::pair<double, double>> locus; ///< (f1, f2) samples
};

/// Energy-conservation loci m*f1 + k*f2 = (E_j - E_i)/h inside the window.
/// k = 0 requests produce vertical lines. Throws on level_i == level_j.
std::vector<ConservationLine> conservation_lines(const Spectrum& sp,
                                                 const std::vector<LineOrder>& orders,
                                                 double f_min_GHz, double f_max_GHz,
                                                 int samples_per_line = 241);

/// The default line set: single-tone verticals at f01 and f12 plus the
/// two-photon (1,1,0->2) and three-photon (2,1,0->3) lines.
std::vector<LineOrder> standard_line_orders();

enum class FeatureKind { peak, dip };

struct Feature {
    double x = 0.0;          ///< coordinate of the scan line the feature sits on
    double y = 0.0;          ///< subpixel extremum coordinate along the scanned axis
    double prominence = 0.0;
};

/// Local extrema with a prominence threshold, scanned line by line along
/// `axis` (0 = x, 1 = y; -1 picks y when it has more than one point).
/// Subpixel positions come from a three-point parabola. A negative
/// threshold means 5% of the map's dynamic range. Results are ordered by
/// descending prominence (ties by coordinates).
std::vector<Feature> detect_features(const ScanResult& r, FeatureKind kind, int axis = -1,
                                     double prominence_threshold = -1.0);

} // namespace jjr
