#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "jjr/circuit.hpp"
#include "jjr/config.hpp"
#include "jjr/csv.hpp"
#include "jjr/dynamics.hpp"
#include "jjr/fit.hpp"
#include "jjr/kernels.hpp"
#include "jjr/spectroscopy.hpp"
#include "jjr/spectrum.hpp"
#include "jjr/thread_pool.hpp"

namespace fs = std::filesystem;
using namespace jjr;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir; // overrides config when set
    int threads = 0;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--threads", args.threads,
                    "worker threads (default: JJR_THREADS or hardware)");
    cmd->add_option("--seed", args.seed, "seed override");
}

struct RunContext {
    RunConfig cfg;
    fs::path out;
    RunManifest manifest;
    int threads = 0;
};

RunContext begin_run(const CommonArgs& args) {
    RunContext ctx;
    ctx.cfg = parse_config(args.config_path);
    if (!args.out_dir.empty()) ctx.cfg.output_dir = args.out_dir;
    if (args.seed >= 0) ctx.cfg.seed = static_cast<std::uint64_t>(args.seed);
    ctx.threads = args.threads > 0 ? args.threads : default_threads();
    ctx.out = ctx.cfg.output_dir;
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec)
        throw IoError("cannot create output directory: " + ctx.out.string());
    ctx.manifest.started_utc = utc_timestamp_now();
    ctx.manifest.effective_config = ctx.cfg.echo();
    char hex[24];
    std::snprintf(hex, sizeof(hex), "0x%016llx",
                  static_cast<unsigned long long>(config_hash(ctx.cfg)));
    ctx.manifest.config_hash_hex = hex;
    return ctx;
}

void finish_run(RunContext& ctx) {
    ctx.manifest.finished_utc = utc_timestamp_now();
    const fs::path mpath = ctx.out / "manifest.json";
    ctx.manifest.outputs.push_back(mpath.string());
    write_manifest(ctx.manifest, mpath.string());
}

std::string emit(RunContext& ctx, const std::string& filename) {
    const std::string path = (ctx.out / filename).string();
    ctx.manifest.outputs.push_back(path);
    return path;
}

const AxisSpec& need_axis(const RunConfig& cfg, bool is_x, const std::string& unit,
                          const std::string& subcommand) {
    const auto& axis = is_x ? cfg.scan_x : cfg.scan_y;
    const char* which = is_x ? "x" : "y";
    if (!axis)
        throw ConfigError("config: $.scan." + std::string(which) + " required for '" +
                          subcommand + "'");
    if (axis->unit != unit)
        throw ConfigError("config: $.scan." + std::string(which) + " for '" + subcommand +
                          "' must be in " + unit + " (axis name suffix)");
    return *axis;
}

double need_fixed(const RunConfig& cfg, const std::string& key,
                  const std::string& subcommand) {
    const auto it = cfg.scan_fixed.find(key);
    if (it == cfg.scan_fixed.end())
        throw ConfigError("config: $.scan.fixed." + key + " required for '" + subcommand +
                          "'");
    return it->second;
}

void run_spectrum(RunContext& ctx) {
    const CircuitParams& p = ctx.cfg.circuit;
    const double ej = ej_at_flux(p);
    const int levels = 6;
    const auto h = build_cpb_hamiltonian(ej, p.ec_GHz, 0.0, ctx.cfg.solver.charge_cutoff);
    const Spectrum exact = eigen_spectrum(h, levels);
    const Spectrum asym = asymptotic_spectrum(ej, p.ec_GHz, levels);
    write_spectrum_csv(exact, asym, emit(ctx, "spectrum_levels.csv"));
    write_derived_csv(derived_quantities(p), emit(ctx, "derived_quantities.csv"));
}

void run_onetone(RunContext& ctx) {
    const auto& fx = need_axis(ctx.cfg, true, "GHz", "onetone");
    const auto& py = need_axis(ctx.cfg, false, "aW", "onetone");
    ScanResult r =
        one_tone_map(ctx.cfg.circuit, fx.values, py.values, ctx.cfg.solver, ctx.threads);
    ctx.manifest.failed_cells = r.failed_cells;
    write_scan_csv(r, emit(ctx, "onetone.csv"));
}

void run_saturation(RunContext& ctx) {
    const auto& px = need_axis(ctx.cfg, true, "aW", "saturation");
    const double f = need_fixed(ctx.cfg, "f_GHz", "saturation");
    const auto curve =
        saturation_curve(ctx.cfg.circuit, f, px.values, ctx.cfg.solver, ctx.threads);
    int failed = 0;
    for (const auto& pt : curve)
        if (!pt.converged) ++failed;
    ctx.manifest.failed_cells = failed;
    write_saturation_csv(curve, emit(ctx, "saturation.csv"));
}

void run_twotone(RunContext& ctx) {
    const auto& p1 = need_axis(ctx.cfg, true, "aW", "twotone");
    const auto& f2 = need_axis(ctx.cfg, false, "GHz", "twotone");
    const double f1 = need_fixed(ctx.cfg, "f1_GHz", "twotone");
    const double p2 = need_fixed(ctx.cfg, "P2_aW", "twotone");
    ScanResult r = two_tone_map(ctx.cfg.circuit, f1, p1.values, f2.values, p2,
                                ctx.cfg.solver, ctx.threads);
    ctx.manifest.failed_cells = r.failed_cells;
    ctx.manifest.skipped_cells = r.skipped_cells;
    write_scan_csv(r, emit(ctx, "twotone.csv"));
}

void run_powermap(RunContext& ctx) {
    const auto& p1 = need_axis(ctx.cfg, true, "aW", "powermap");
    const auto& p2 = need_axis(ctx.cfg, false, "aW", "powermap");
    const double f1 = need_fixed(ctx.cfg, "f1_GHz", "powermap");
    const double f2 = need_fixed(ctx.cfg, "f2_GHz", "powermap");
    ScanResult r = power_power_map(ctx.cfg.circuit, f1, f2, p1.values, p2.values,
                                   ctx.cfg.solver, ctx.threads);
    ctx.manifest.failed_cells = r.failed_cells;
    write_scan_csv(r, emit(ctx, "powermap.csv"));
}

void run_diagram(RunContext& ctx) {
    const auto& f1 = need_axis(ctx.cfg, true, "GHz", "diagram");
    const auto& f2 = need_axis(ctx.cfg, false, "GHz", "diagram");
    const double p1 = need_fixed(ctx.cfg, "P1_aW", "diagram");
    const double p2 = need_fixed(ctx.cfg, "P2_aW", "diagram");
    const bool allow_equal = ctx.cfg.drive && ctx.cfg.drive->allow_equal_frequencies;
    ScanResult r = energy_diagram(ctx.cfg.circuit, f1.values, f2.values, p1, p2,
                                  ctx.cfg.solver, ctx.threads, allow_equal);
    ctx.manifest.failed_cells = r.failed_cells;
    ctx.manifest.skipped_cells = r.skipped_cells;
    write_scan_csv(r, emit(ctx, "diagram.csv"));

    const double ej = ej_at_flux(ctx.cfg.circuit);
    const Spectrum sp = asymptotic_spectrum(ej, ctx.cfg.circuit.ec_GHz, 4);
    const double lo = std::min(f1.values.front(), f2.values.front());
    const double hi = std::max(f1.values.back(), f2.values.back());
    const auto lines = conservation_lines(sp, standard_line_orders(), lo, hi);
    write_lines_csv(lines, emit(ctx, "diagram_lines.csv"));
}

void run_fit(RunContext& ctx) {
    if (!ctx.cfg.fit)
        throw ConfigError("config: $.fit block required for 'fit'");
    const Trace tr = read_trace_csv(ctx.cfg.fit->trace_csv);
    const FitResult fit =
        fit_lorentzian(tr, ctx.cfg.fit->kind, ctx.cfg.fit->free_amplitude);
    write_fit_report(fit, emit(ctx, "fit_report.txt"), emit(ctx, "fit_result.csv"));
}

int dispatch(const std::string& name, const CommonArgs& args) {
    RunContext ctx = begin_run(args);
    if (name == "spectrum")
        run_spectrum(ctx);
    else if (name == "onetone")
        run_onetone(ctx);
    else if (name == "saturation")
        run_saturation(ctx);
    else if (name == "twotone")
        run_twotone(ctx);
    else if (name == "powermap")
        run_powermap(ctx);
    else if (name == "diagram")
        run_diagram(ctx);
    else if (name == "fit")
        run_fit(ctx);
    else
        throw ConfigError("unknown subcommand: " + name);
    finish_run(ctx);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driven-dissipative simulator for single-Josephson-junction "
                 "high-impedance microwave resonators"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"spectrum", "junction spectrum and derived circuit quantities"},
        {"onetone", "transmission vs drive frequency and power"},
        {"saturation", "on-resonance output power vs input power"},
        {"twotone", "pump-probe map vs pump power and probe frequency"},
        {"powermap", "probe output power vs both drive powers"},
        {"diagram", "energy diagram vs both drive frequencies"},
        {"fit", "lineshape fit of a measured or simulated trace"}};

    std::map<std::string, CommonArgs> args;
    for (const auto& [name, desc] : subs)
        add_common(app.add_subcommand(name, desc), args[name]);

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return dispatch(name, args[name]);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
