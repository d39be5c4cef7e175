#include "fragscope/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "fragscope/errors.hpp"

namespace fragscope {

std::string csv_double(double v) {
    char buf[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json RunArtifact::config_echo(const ExperimentConfig& c) {
    nlohmann::json j;
    j["command"] = c.command;
    j["model"]["kind"] = c.model_kind;
    if (c.model_kind == "binary-powerlaw") j["model"]["a"] = c.model_a;
    if (!c.model_atoms.empty()) {
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& atom : c.model_atoms)
            atoms.push_back({atom.rate, atom.sizes});
        j["model"]["atoms"] = atoms;
    }
    j["truncation"]["epsilon"] = c.truncation_epsilon;
    if (c.seed.has_value()) j["seed"] = *c.seed;
    j["output_dir"] = c.output_dir;
    if (!c.grid.empty()) j["grid"] = c.grid;
    if (c.replicas > 0) j["replicas"] = c.replicas;
    if (c.n > 0) j["n"] = c.n;
    j["command_parameters"] = {
        {"n_lhs", c.n_lhs},       {"n_rhs", c.n_rhs},   {"n_pairs", c.n_pairs},
        {"n_direct", c.n_direct}, {"horizon", c.horizon}, {"t", c.t},
        {"prune_margin", c.prune_margin}, {"near_max_delta", c.near_max_delta},
        {"delta", c.delta},       {"F", c.fspec},       {"F_param", c.f_param},
        {"measure", c.measure},   {"check", c.check},   {"process", c.process},
        {"levy_lambda", c.levy_lambda}, {"levy_theta", c.levy_theta},
        {"r", c.r}, {"h", c.h}, {"u", c.u}, {"f", c.f}, {"g", c.g},
        {"alpha", c.alpha}, {"C", c.cap_c}, {"l_coef", c.l_coef},
        {"k", c.k}, {"N", c.big_n}};
    if (!c.beta.empty()) j["beta"] = c.beta;
    return j;
}

RunArtifact::RunArtifact(std::string output_dir, const ExperimentConfig& config)
    : dir_(std::move(output_dir)), echo_(config_echo(config)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw PreconditionError("output-unwritable: cannot create " + dir_);
    write_manifest(-1.0);  // crash before completion still leaves this record
}

void RunArtifact::write_manifest(double wall_seconds) {
    nlohmann::json m;
    m["toolkit"] = "fragscope";
    m["version"] = kToolkitVersion;
    m["config"] = echo_;
    if (wall_seconds >= 0.0) m["wall_seconds"] = wall_seconds;
    else m["wall_seconds"] = nullptr;
    std::ofstream out(dir_ + "/manifest.json");
    if (!out) throw PreconditionError("output-unwritable: cannot write manifest in " + dir_);
    out << m.dump(2) << "\n";
}

void RunArtifact::finalize_manifest(double wall_seconds) { write_manifest(wall_seconds); }

void RunArtifact::write_summary(const nlohmann::json& summary) {
    std::ofstream out(dir_ + "/summary.json");
    if (!out) throw PreconditionError("output-unwritable: cannot write summary in " + dir_);
    out << summary.dump(2) << "\n";
}

std::ofstream RunArtifact::open_csv(const std::string& name, const std::string& header) {
    std::ofstream out(dir_ + "/" + name + ".csv");
    if (!out) throw PreconditionError("output-unwritable: cannot write " + name + ".csv");
    out << header << "\n";
    return out;
}

} // namespace fragscope
