#include "fragscope/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fragscope/errors.hpp"
#include "fragscope/parallel.hpp"

namespace fragscope {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw PreconditionError("config-parse: bad numeric value for '" + key + "': " + value);
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw PreconditionError("config-parse: bad integer value for '" + key + "': " + value);
    return static_cast<std::uint64_t>(v);
}

} // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    const std::string body = trim(text);
    if (body.find(':') != std::string::npos) {
        // start:step:stop, inclusive
        std::istringstream xs(body);
        std::string a, b, c;
        if (!std::getline(xs, a, ':') || !std::getline(xs, b, ':') || !std::getline(xs, c))
            throw PreconditionError("config-parse: range grid must be start:step:stop");
        const double start = to_double("grid", trim(a));
        const double step = to_double("grid", trim(b));
        const double stop = to_double("grid", trim(c));
        if (!(step > 0.0) || stop < start)
            throw PreconditionError("config-parse: bad grid range");
        for (double v = start; v <= stop + 1e-9 * step; v += step) out.push_back(v);
        return out;
    }
    std::istringstream xs(body);
    std::string item;
    while (std::getline(xs, item, ',')) {
        const std::string cell = trim(item);
        if (!cell.empty()) out.push_back(to_double("grid", cell));
    }
    return out;
}

std::vector<CustomAtom> parse_atoms(const std::string& text) {
    // [[rate, [s1, s2, ...]], ...]
    std::vector<CustomAtom> atoms;
    std::size_t i = 0;
    const auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    const auto expect = [&](char c) {
        skip_ws();
        if (i >= text.size() || text[i] != c)
            throw PreconditionError(std::string("config-parse: expected '") + c + "' in model.atoms");
        ++i;
    };
    const auto number = [&] {
        skip_ws();
        const char* begin = text.c_str() + i;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw PreconditionError("config-parse: expected number in model.atoms");
        i += static_cast<std::size_t>(end - begin);
        return v;
    };

    expect('[');
    skip_ws();
    while (i < text.size() && text[i] != ']') {
        expect('[');
        CustomAtom atom;
        atom.rate = number();
        expect(',');
        expect('[');
        for (;;) {
            atom.sizes.push_back(number());
            skip_ws();
            if (i < text.size() && text[i] == ',') { ++i; continue; }
            break;
        }
        expect(']');
        expect(']');
        atoms.push_back(std::move(atom));
        skip_ws();
        if (i < text.size() && text[i] == ',') { ++i; skip_ws(); }
    }
    expect(']');
    skip_ws();
    if (i != text.size()) throw PreconditionError("config-parse: trailing text after model.atoms");
    return atoms;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "command") cfg.command = value;
    else if (key == "model.kind") cfg.model_kind = value;
    else if (key == "model.a") cfg.model_a = to_double(key, value);
    else if (key == "model.atoms") cfg.model_atoms = parse_atoms(value);
    else if (key == "truncation.epsilon") cfg.truncation_epsilon = to_double(key, value);
    else if (key == "seed") cfg.seed = to_u64(key, value);
    else if (key == "workers") cfg.workers = static_cast<unsigned>(to_u64(key, value));
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "grid") cfg.grid = parse_grid(value);
    else if (key == "replicas") cfg.replicas = to_u64(key, value);
    else if (key == "n") cfg.n = to_u64(key, value);
    else if (key == "n_lhs") cfg.n_lhs = to_u64(key, value);
    else if (key == "n_rhs") cfg.n_rhs = to_u64(key, value);
    else if (key == "n_pairs") cfg.n_pairs = to_u64(key, value);
    else if (key == "n_direct") cfg.n_direct = to_u64(key, value);
    else if (key == "horizon") cfg.horizon = to_double(key, value);
    else if (key == "t") cfg.t = to_double(key, value);
    else if (key == "prune_margin") cfg.prune_margin = to_double(key, value);
    else if (key == "near_max_delta") cfg.near_max_delta = to_double(key, value);
    else if (key == "delta") cfg.delta = to_double(key, value);
    else if (key == "F") cfg.fspec = value;
    else if (key == "F_param") cfg.f_param = to_double(key, value);
    else if (key == "measure") cfg.measure = value;
    else if (key == "beta") cfg.beta = parse_grid(value);
    else if (key == "check") cfg.check = value;
    else if (key == "process") cfg.process = value;
    else if (key == "levy.lambda") cfg.levy_lambda = to_double(key, value);
    else if (key == "levy.theta") cfg.levy_theta = to_double(key, value);
    else if (key == "r") cfg.r = to_double(key, value);
    else if (key == "h") cfg.h = to_double(key, value);
    else if (key == "u") cfg.u = to_double(key, value);
    else if (key == "f") cfg.f = to_double(key, value);
    else if (key == "g") cfg.g = to_double(key, value);
    else if (key == "alpha") cfg.alpha = to_double(key, value);
    else if (key == "C") cfg.cap_c = to_double(key, value);
    else if (key == "l_coef") cfg.l_coef = to_double(key, value);
    else if (key == "k") cfg.k = static_cast<int>(to_u64(key, value));
    else if (key == "N") cfg.big_n = to_u64(key, value);
    else throw PreconditionError("config-parse: unknown key '" + key + "'");
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("config-parse: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("config-parse: line " + std::to_string(lineno) +
                                    " is not 'key = value'");
        apply_config_entry(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
}

DislocationModel ExperimentConfig::build_model() const {
    if (model_kind == "binary-uniform") return DislocationModel::binary_uniform();
    if (model_kind == "ternary-deterministic" || model_kind == "ternary")
        return DislocationModel::ternary_deterministic();
    if (model_kind == "binary-powerlaw") return DislocationModel::binary_powerlaw(model_a);
    if (model_kind == "custom-finite") return DislocationModel::custom_finite(model_atoms);
    throw PreconditionError("unknown model.kind '" + model_kind + "'");
}

TruncationPolicy ExperimentConfig::build_policy(const DislocationModel& model) const {
    return TruncationPolicy::make(model, truncation_epsilon);
}

unsigned ExperimentConfig::worker_count() const {
    return workers > 0 ? workers : default_worker_count();
}

void ExperimentConfig::require_seed() const {
    if (command == "exponent" || command == "sum") return;  // deterministic commands
    if (!seed.has_value())
        throw PreconditionError("seed is mandatory (no entropy default); pass --seed");
}

} // namespace fragscope
