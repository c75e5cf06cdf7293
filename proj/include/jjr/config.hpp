#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "jjr/dynamics.hpp"
#include "jjr/fit.hpp"
#include "jjr/spectroscopy.hpp"

namespace jjr {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct FitConfig {
    std::string trace_csv;
    LineshapeKind kind = LineshapeKind::transmission;
    bool free_amplitude = false;
};

/// Fully validated run configuration. Loaded from strict JSON: unknown keys
/// are rejected with their path, physical keys carry their unit in the name
/// (Ec_GHz, kappa_c_MHz, P1_aW, ...).
struct RunConfig {
    CircuitParams circuit;
    SolverSettings solver;
    std::optional<DriveSpec> drive;
    std::optional<AxisSpec> scan_x;
    std::optional<AxisSpec> scan_y;
    std::map<std::string, double> scan_fixed;
    std::optional<FitConfig> fit;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    /// Defaults-filled echo of the configuration; re-parses to an
    /// equivalent RunConfig and feeds the config hash.
    nlohmann::json echo() const;
};

RunConfig parse_config_json(const nlohmann::json& j);
RunConfig parse_config(const std::string& path);

/// FNV-1a 64-bit over the canonical echo dump.
std::uint64_t config_hash(const RunConfig& cfg);

struct RunManifest {
    std::string artifact_version = kArtifactVersion;
    std::string config_hash_hex;
    std::string started_utc;
    std::string finished_utc;
    int failed_cells = 0;
    int skipped_cells = 0;
    std::vector<std::string> outputs;
    nlohmann::json effective_config;
};

std::string utc_timestamp_now();
void write_manifest(const RunManifest& m, const std::string& path);

} // namespace jjr
