#include "jjr/config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace jjr {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            fail(path + "." + key, "unknown key");
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  std::optional<double> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        fail(path + "." + key, "required key missing (name carries the expected unit)");
    }
    if (!j[key].is_number())
        fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key, int def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer())
        fail(path + "." + key, "expected an integer");
    return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key, bool def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_boolean())
        fail(path + "." + key, "expected a boolean");
    return j[key].get<bool>();
}

AxisSpec parse_axis(const json& j, const std::string& path, const std::string& name_hint) {
    reject_unknown(j, path, {"name", "unit", "start", "stop", "points", "values"});
    AxisSpec axis;
    axis.name = j.contains("name") ? j["name"].get<std::string>() : name_hint;
    if (axis.name.size() < 4 ||
        (axis.name.rfind("_GHz") != axis.name.size() - 4 &&
         axis.name.rfind("_aW") != axis.name.size() - 3))
        fail(path + ".name", "axis names must carry a unit suffix (_GHz or _aW)");
    axis.unit = axis.name.rfind("_GHz") != std::string::npos ? "GHz" : "aW";
    if (j.contains("values")) {
        if (j.contains("start") || j.contains("stop") || j.contains("points"))
            fail(path, "give either explicit values or start/stop/points, not both");
        if (!j["values"].is_array() || j["values"].empty())
            fail(path + ".values", "expected a non-empty array");
        for (const auto& v : j["values"]) {
            if (!v.is_number())
                fail(path + ".values", "expected numbers");
            axis.values.push_back(v.get<double>());
        }
    } else {
        const double start = get_number(j, path, "start");
        const double stop = get_number(j, path, "stop");
        const int points = get_int(j, path, "points", -1);
        if (points < 1)
            fail(path + ".points", "required integer >= 1");
        if (points == 1) {
            axis.values = {start};
        } else {
            if (!(stop > start))
                fail(path, "stop must exceed start");
            axis.values.resize(points);
            for (int i = 0; i < points; ++i)
                axis.values[i] = start + (stop - start) * i / (points - 1.0);
        }
    }
    axis.validate();
    return axis;
}

} // namespace

RunConfig parse_config_json(const json& root) {
    if (!root.is_object())
        throw ConfigError("config: top level must be a JSON object");
    reject_unknown(root, "$",
                   {"circuit", "solver", "scan", "drive", "fit", "output", "seed"});

    RunConfig cfg;

    if (!root.contains("circuit"))
        fail("$.circuit", "required block missing");
    {
        const json& c = root["circuit"];
        const std::string p = "$.circuit";
        reject_unknown(c, p,
                       {"EJ_max_GHz", "Ec_GHz", "kappa_c_MHz", "kappa_i_MHz", "Z0_Ohm",
                        "flux_Phi0", "asymmetry_d"});
        cfg.circuit.ej_max_GHz = get_number(c, p, "EJ_max_GHz");
        cfg.circuit.ec_GHz = get_number(c, p, "Ec_GHz");
        cfg.circuit.kappa_c_MHz = get_number(c, p, "kappa_c_MHz");
        cfg.circuit.kappa_i_MHz = get_number(c, p, "kappa_i_MHz");
        cfg.circuit.z0_Ohm = get_number(c, p, "Z0_Ohm", 50.0);
        cfg.circuit.flux = get_number(c, p, "flux_Phi0", 0.0);
        cfg.circuit.asymmetry_d = get_number(c, p, "asymmetry_d", 0.0);
        cfg.circuit.validate();
    }

    if (root.contains("solver")) {
        const json& s = root["solver"];
        const std::string p = "$.solver";
        reject_unknown(s, p,
                       {"charge_cutoff", "fock_dim", "max_fock_dim", "escalation_step",
                        "top_pop_tol", "steady_residual_tol", "ode_tol",
                        "transient_kappa_factor", "window_beat_periods",
                        "samples_per_period", "max_evolve_ns", "drift_tol"});
        SolverSettings& sv = cfg.solver;
        sv.charge_cutoff = get_int(s, p, "charge_cutoff", sv.charge_cutoff);
        sv.fock_dim = get_int(s, p, "fock_dim", sv.fock_dim);
        sv.max_fock_dim = get_int(s, p, "max_fock_dim", sv.max_fock_dim);
        sv.escalation_step = get_int(s, p, "escalation_step", sv.escalation_step);
        sv.top_pop_tol = get_number(s, p, "top_pop_tol", sv.top_pop_tol);
        sv.steady_residual_tol =
            get_number(s, p, "steady_residual_tol", sv.steady_residual_tol);
        sv.ode_tol = get_number(s, p, "ode_tol", sv.ode_tol);
        sv.transient_kappa_factor =
            get_number(s, p, "transient_kappa_factor", sv.transient_kappa_factor);
        sv.window_beat_periods = get_int(s, p, "window_beat_periods", sv.window_beat_periods);
        sv.samples_per_period = get_int(s, p, "samples_per_period", sv.samples_per_period);
        sv.max_evolve_ns = get_number(s, p, "max_evolve_ns", sv.max_evolve_ns);
        sv.drift_tol = get_number(s, p, "drift_tol", sv.drift_tol);
        if (sv.charge_cutoff < 5) fail(p + ".charge_cutoff", "must be >= 5");
        if (sv.fock_dim < 3) fail(p + ".fock_dim", "must be >= 3");
        if (sv.max_fock_dim < sv.fock_dim) fail(p + ".max_fock_dim", "must be >= fock_dim");
        if (sv.escalation_step < 1) fail(p + ".escalation_step", "must be >= 1");
        if (!(sv.ode_tol > 0.0)) fail(p + ".ode_tol", "must be > 0");
        if (sv.window_beat_periods < 20)
            fail(p + ".window_beat_periods", "demodulation needs >= 20 beat periods");
        if (sv.samples_per_period < 8) fail(p + ".samples_per_period", "must be >= 8");
    }

    if (root.contains("scan")) {
        const json& s = root["scan"];
        const std::string p = "$.scan";
        reject_unknown(s, p, {"x", "y", "fixed"});
        if (s.contains("x")) cfg.scan_x = parse_axis(s["x"], p + ".x", "x_GHz");
        if (s.contains("y")) cfg.scan_y = parse_axis(s["y"], p + ".y", "y_GHz");
        if (s.contains("fixed")) {
            if (!s["fixed"].is_object())
                fail(p + ".fixed", "expected an object of unit-suffixed numbers");
            for (const auto& [key, value] : s["fixed"].items()) {
                if (!value.is_number())
                    fail(p + ".fixed." + key, "expected a number");
                const bool has_unit = key.size() >= 4 &&
                                      (key.rfind("_GHz") == key.size() - 4 ||
                                       key.rfind("_aW") == key.size() - 3);
                if (!has_unit)
                    fail(p + ".fixed." + key, "fixed keys must carry _GHz or _aW suffix");
                const double v = value.get<double>();
                if (key.rfind("_aW") == key.size() - 3 && v < 0.0)
                    fail(p + ".fixed." + key, "powers in aW must be >= 0");
                if (key.rfind("_GHz") == key.size() - 4 && !(v > 0.0))
                    fail(p + ".fixed." + key, "frequencies in GHz must be > 0");
                cfg.scan_fixed[key] = v;
            }
        }
        for (const auto* axis : {cfg.scan_x ? &*cfg.scan_x : nullptr,
                                 cfg.scan_y ? &*cfg.scan_y : nullptr})
            if (axis && axis->unit == "aW")
                for (double v : axis->values)
                    if (v < 0.0)
                        fail(p, "power axis '" + axis->name + "' has negative values");
    }

    if (root.contains("drive")) {
        const json& d = root["drive"];
        const std::string p = "$.drive";
        reject_unknown(d, p, {"tones", "allow_equal_frequencies"});
        DriveSpec spec;
        spec.allow_equal_frequencies = get_bool(d, p, "allow_equal_frequencies", false);
        if (!d.contains("tones") || !d["tones"].is_array())
            fail(p + ".tones", "expected an array of tones");
        int i = 0;
        for (const auto& t : d["tones"]) {
            const std::string tp = p + ".tones[" + std::to_string(i++) + "]";
            reject_unknown(t, tp, {"f_GHz", "P_aW", "port"});
            Tone tone;
            tone.f_GHz = get_number(t, tp, "f_GHz");
            tone.power_aW = get_number(t, tp, "P_aW");
            if (t.contains("port")) {
                const std::string port = t["port"].get<std::string>();
                if (port == "left")
                    tone.port = Port::left;
                else if (port == "right")
                    tone.port = Port::right;
                else
                    fail(tp + ".port", "expected 'left' or 'right'");
            }
            spec.tones.push_back(tone);
        }
        spec.validate();
        cfg.drive = spec;
    }

    if (root.contains("fit")) {
        const json& f = root["fit"];
        const std::string p = "$.fit";
        reject_unknown(f, p, {"trace_csv", "kind", "free_amplitude"});
        FitConfig fc;
        if (!f.contains("trace_csv") || !f["trace_csv"].is_string())
            fail(p + ".trace_csv", "required string");
        fc.trace_csv = f["trace_csv"].get<std::string>();
        if (f.contains("kind")) {
            const std::string k = f["kind"].get<std::string>();
            if (k == "transmission")
                fc.kind = LineshapeKind::transmission;
            else if (k == "reflection")
                fc.kind = LineshapeKind::reflection;
            else
                fail(p + ".kind", "expected 'transmission' or 'reflection'");
        }
        fc.free_amplitude = get_bool(f, p, "free_amplitude", false);
        cfg.fit = fc;
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        reject_unknown(o, "$.output", {"dir"});
        if (o.contains("dir")) {
            if (!o["dir"].is_string())
                fail("$.output.dir", "expected a string");
            cfg.output_dir = o["dir"].get<std::string>();
        }
    }

    if (root.contains("seed")) {
        if (!root["seed"].is_number_integer() || root["seed"].get<long long>() < 0)
            fail("$.seed", "expected a non-negative integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }

    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("config: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return parse_config_json(j);
}

json RunConfig::echo() const {
    json j;
    j["circuit"] = {{"EJ_max_GHz", circuit.ej_max_GHz},
                    {"Ec_GHz", circuit.ec_GHz},
                    {"kappa_c_MHz", circuit.kappa_c_MHz},
                    {"kappa_i_MHz", circuit.kappa_i_MHz},
                    {"Z0_Ohm", circuit.z0_Ohm},
                    {"flux_Phi0", circuit.flux},
                    {"asymmetry_d", circuit.asymmetry_d}};
    j["solver"] = {{"charge_cutoff", solver.charge_cutoff},
                   {"fock_dim", solver.fock_dim},
                   {"max_fock_dim", solver.max_fock_dim},
                   {"escalation_step", solver.escalation_step},
                   {"top_pop_tol", solver.top_pop_tol},
                   {"steady_residual_tol", solver.steady_residual_tol},
                   {"ode_tol", solver.ode_tol},
                   {"transient_kappa_factor", solver.transient_kappa_factor},
                   {"window_beat_periods", solver.window_beat_periods},
                   {"samples_per_period", solver.samples_per_period},
                   {"max_evolve_ns", solver.max_evolve_ns},
                   {"drift_tol", solver.drift_tol}};
    if (scan_x || scan_y || !scan_fixed.empty()) {
        json s = json::object();
        auto axis_json = [](const AxisSpec& a) {
            return json{{"name", a.name}, {"values", a.values}};
        };
        if (scan_x) s["x"] = axis_json(*scan_x);
        if (scan_y) s["y"] = axis_json(*scan_y);
        if (!scan_fixed.empty()) s["fixed"] = scan_fixed;
        j["scan"] = s;
    }
    if (drive) {
        json tones = json::array();
        for (const Tone& t : drive->tones)
            tones.push_back({{"f_GHz", t.f_GHz},
                             {"P_aW", t.power_aW},
                             {"port", t.port == Port::left ? "left" : "right"}});
        j["drive"] = {{"tones", tones},
                      {"allow_equal_frequencies", drive->allow_equal_frequencies}};
    }
    if (fit)
        j["fit"] = {{"trace_csv", fit->trace_csv},
                    {"kind", fit->kind == LineshapeKind::transmission ? "transmission"
                                                                      : "reflection"},
                    {"free_amplitude", fit->free_amplitude}};
    j["output"] = {{"dir", output_dir}};
    j["seed"] = seed;
    return j;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string dump = cfg.echo().dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    json j;
    j["artifact_version"] = m.artifact_version;
    j["config_hash"] = m.config_hash_hex;
    j["started_utc"] = m.started_utc;
    j["finished_utc"] = m.finished_utc;
    j["failed_cells"] = m.failed_cells;
    j["skipped_cells"] = m.skipped_cells;
    j["outputs"] = m.outputs;
    j["effective_config"] = m.effective_config;
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open for writing: " + path);
    os << j.dump(2) << '\n';
    if (!os)
        throw IoError("write failed: " + path);
}

} // namespace jjr
