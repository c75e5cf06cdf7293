#pragma once

#include <string>
#include <vector>

#include "jjr/fit.hpp"
#include "jjr/spectroscopy.hpp"
#include "jjr/spectrum.hpp"

namespace jjr {

/// %.12g formatting; NaN serializes as "nan".
std::string format_g12(double v);

/// Long-form map CSV: one row per cell,
/// x,y,re_amp,im_amp,T,P_out_aW[,aux],converged,fock_dim.
void write_scan_csv(const ScanResult& r, const std::string& path);

void write_saturation_csv(const std::vector<SaturationPoint>& curve,
                          const std::string& path);

/// Conservation-line overlay keyed by (m,k,i,j).
void write_lines_csv(const std::vector<ConservationLine>& lines, const std::string& path);

void write_trace_csv(const Trace& trace, const std::string& path);

/// Two- or three-column trace with a one-line header
/// (frequency_GHz,value[,sigma]).
Trace read_trace_csv(const std::string& path);

/// Flat key=value report plus a one-row machine-readable CSV.
void write_fit_report(const FitResult& fit, const std::string& txt_path,
                      const std::string& csv_path);

/// Level table: n,E_GHz_<method> per spectrum passed.
void write_spectrum_csv(const Spectrum& exact, const Spectrum& asymptotic,
                        const std::string& path);

/// key,value table for derived circuit quantities.
void write_derived_csv(const DerivedCircuit& d, const std::string& path);

} // namespace jjr
