#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fragscope/config.hpp"

namespace fragscope {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Output directory of a single run: manifest.json (written before any
// computation so a crash still leaves a record), summary.json, raw CSVs.
// The manifest carries timing; summary and CSVs are byte-reproducible.
class RunArtifact {
public:
    RunArtifact(std::string output_dir, const ExperimentConfig& config);

    // Rewritten at the end with the wall time filled in.
    void finalize_manifest(double wall_seconds);

    void write_summary(const nlohmann::json& summary);

    // Opens <name>.csv and writes the header row.
    std::ofstream open_csv(const std::string& name, const std::string& header);

    const std::string& dir() const { return dir_; }

    static nlohmann::json config_echo(const ExperimentConfig& config);

private:
    void write_manifest(double wall_seconds);
    std::string dir_;
    nlohmann::json echo_;
};

// Fixed-format float for CSV cells: shortest representation that round
// trips, so identical doubles always produce identical bytes.
std::string csv_double(double v);

} // namespace fragscope
