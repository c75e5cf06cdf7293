#include "jjr/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace jjr {

std::string format_g12(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary); // binary: LF on every platform
    if (!os)
        throw IoError("cannot open for writing: " + path);
    return os;
}

} // namespace

void write_scan_csv(const ScanResult& r, const std::string& path) {
    std::ofstream os = open_out(path);
    os << r.grid.x.name << ',' << r.grid.y.name << ",re_amp,im_amp,T,P_out_aW";
    if (!r.aux_name.empty()) os << ',' << r.aux_name;
    os << ",converged,fock_dim\n";
    for (std::size_t ix = 0; ix < r.nx(); ++ix)
        for (std::size_t iy = 0; iy < r.ny(); ++iy) {
            const CellValue& c = r.at(ix, iy);
            os << format_g12(r.grid.x.values[ix]) << ',' << format_g12(r.grid.y.values[iy])
               << ',' << format_g12(c.amp.real()) << ',' << format_g12(c.amp.imag()) << ','
               << format_g12(c.T) << ',' << format_g12(c.p_out_aW);
            if (!r.aux_name.empty()) os << ',' << format_g12(c.aux);
            os << ',' << (c.converged ? "true" : "false") << ',' << c.fock_dim << '\n';
        }
    if (!os)
        throw IoError("write failed: " + path);
}

void write_saturation_csv(const std::vector<SaturationPoint>& curve,
                          const std::string& path) {
    std::ofstream os = open_out(path);
    os << "P_in_aW,P_out_aW,T,converged\n";
    for (const SaturationPoint& p : curve)
        os << format_g12(p.p_in_aW) << ',' << format_g12(p.p_out_aW) << ','
           << format_g12(p.T) << ',' << (p.converged ? "true" : "false") << '\n';
    if (!os)
        throw IoError("write failed: " + path);
}

void write_lines_csv(const std::vector<ConservationLine>& lines, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "m,k,level_i,level_j,energy_GHz,f1_GHz,f2_GHz\n";
    for (const ConservationLine& l : lines)
        for (const auto& [f1, f2] : l.locus)
            os << l.order.m << ',' << l.order.k << ',' << l.order.level_i << ','
               << l.order.level_j << ',' << format_g12(l.energy_GHz) << ','
               << format_g12(f1) << ',' << format_g12(f2) << '\n';
    if (!os)
        throw IoError("write failed: " + path);
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream os = open_out(path);
    const bool has_sigma = !trace.sigma.empty();
    os << "frequency_GHz,value" << (has_sigma ? ",sigma" : "") << '\n';
    for (std::size_t i = 0; i < trace.x_GHz.size(); ++i) {
        os << format_g12(trace.x_GHz[i]) << ',' << format_g12(trace.y[i]);
        if (has_sigma) os << ',' << format_g12(trace.sigma[i]);
        os << '\n';
    }
    if (!os)
        throw IoError("write failed: " + path);
}

Trace read_trace_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open trace CSV: " + path);
    std::string line;
    if (!std::getline(is, line))
        throw IoError("empty trace CSV: " + path);

    Trace tr;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ',')) {
            try {
                vals.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(lineno) +
                              ": not a number: '" + field + "'");
            }
        }
        if (vals.size() != 2 && vals.size() != 3)
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": expected 2 or 3 columns");
        tr.x_GHz.push_back(vals[0]);
        tr.y.push_back(vals[1]);
        if (vals.size() == 3) tr.sigma.push_back(vals[2]);
    }
    if (!tr.sigma.empty() && tr.sigma.size() != tr.x_GHz.size())
        throw IoError(path + ": mixed 2- and 3-column rows");
    tr.validate();
    return tr;
}

void write_fit_report(const FitResult& fit, const std::string& txt_path,
                      const std::string& csv_path) {
    {
        std::ofstream os = open_out(txt_path);
        for (const auto& [key, value] : fit.params)
            os << key << " = " << format_g12(value) << '\n';
        os << "residual_rms = " << format_g12(fit.residual_rms) << '\n';
        os << "iterations = " << fit.iterations << '\n';
        os << "converged = " << (fit.converged ? "true" : "false") << '\n';
        for (std::size_t i = 0; i < fit.param_names.size(); ++i)
            os << "sigma(" << fit.param_names[i]
               << ") = " << format_g12(std::sqrt(std::max(0.0, fit.covariance(i, i))))
               << '\n';
        if (!os)
            throw IoError("write failed: " + txt_path);
    }
    {
        std::ofstream os = open_out(csv_path);
        bool first = true;
        for (const auto& [key, value] : fit.params) {
            os << (first ? "" : ",") << key;
            first = false;
        }
        os << ",residual_rms,iterations,converged\n";
        first = true;
        for (const auto& [key, value] : fit.params) {
            os << (first ? "" : ",") << format_g12(value);
            first = false;
        }
        os << ',' << format_g12(fit.residual_rms) << ',' << fit.iterations << ','
           << (fit.converged ? "true" : "false") << '\n';
        if (!os)
            throw IoError("write failed: " + csv_path);
    }
}

void write_spectrum_csv(const Spectrum& exact, const Spectrum& asymptotic,
                        const std::string& path) {
    std::ofstream os = open_out(path);
    os << "n,E_GHz_charge_basis,E_GHz_asymptotic\n";
    const int n = std::min(exact.levels(), asymptotic.levels());
    // report energies relative to the ground level so the two ladders align
    for (int i = 0; i < n; ++i)
        os << i << ','
           << format_g12(exact.energies_GHz[i] - exact.energies_GHz[0]) << ','
           << format_g12(asymptotic.energies_GHz[i] - asymptotic.energies_GHz[0]) << '\n';
    if (!os)
        throw IoError("write failed: " + path);
}

void write_derived_csv(const DerivedCircuit& d, const std::string& path) {
    std::ofstream os = open_out(path);
    os << "quantity,value\n";
    os << "f01_GHz," << format_g12(d.f01_GHz) << '\n';
    os << "f12_GHz," << format_g12(d.f12_GHz) << '\n';
    os << "L_H," << format_g12(d.inductance_H) << '\n';
    os << "C_sigma_F," << format_g12(d.c_sigma_F) << '\n';
    os << "Zr_Ohm," << format_g12(d.zr_Ohm) << '\n';
    os << "C_c_F," << format_g12(d.c_coupling_F) << '\n';
    if (!os)
        throw IoError("write failed: " + path);
}

} // namespace jjr
