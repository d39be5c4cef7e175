#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fragscope/model.hpp"

namespace fragscope {

// One experiment, fully resolved before any simulation starts. Populated
// from a flat key-value config file and/or command-line flags; the seed is
// mandatory for every command that consumes randomness.
struct ExperimentConfig {
    std::string command;

    // model block
    std::string model_kind = "binary-uniform";
    double model_a = 1.5;
    std::vector<CustomAtom> model_atoms;
    double truncation_epsilon = 0.0;

    // run block
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;  // 0: default pool size
    std::string output_dir = "fragscope-out";

    // shared numeric knobs (used per command)
    std::vector<double> grid;
    std::uint64_t replicas = 0;
    std::uint64_t n = 0;
    std::uint64_t n_lhs = 100000, n_rhs = 100000;
    std::uint64_t n_pairs = 100000, n_direct = 20000;
    double horizon = 0.0;
    double t = 1.0;
    double prune_margin = 0.05;
    double near_max_delta = 0.1;
    double delta = 0.1;
    std::string fspec = "const";
    double f_param = 0.0;
    std::string measure = "P";
    std::vector<double> beta;

    // fluctuation block
    std::string check = "smallball";
    std::string process = "poisson";
    double levy_lambda = 1.0;
    double levy_theta = 1.0;
    double r = -1.0;
    double h = 1.0;
    double u = 1.0;
    double f = 2.0;
    double g = 2.0;
    double alpha = 1.0;
    double cap_c = 4.0;
    double l_coef = 0.62;
    int k = 3;
    std::uint64_t big_n = 1000000;

    DislocationModel build_model() const;
    TruncationPolicy build_policy(const DislocationModel& model) const;
    unsigned worker_count() const;
    void require_seed() const;  // throws unless the command is deterministic
};

// Parse `key = value` lines ('#' comments, blank lines allowed) into the
// config. Unknown keys are rejected. The grammar is documented in
// docs/config.md; lists are comma-separated or start:step:stop ranges, and
// model.atoms uses the nested [[rate, [s1, s2, ...]], ...] form.
void apply_config_file(ExperimentConfig& config, const std::string& path);

// Single assignment, shared by the file parser. Exposed for tests.
void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value);

std::vector<double> parse_grid(const std::string& text);
std::vector<CustomAtom> parse_atoms(const std::string& text);

} // namespace fragscope
