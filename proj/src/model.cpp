#include "fragscope/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fragscope/errors.hpp"
#include "fragscope/quadrature.hpp"

namespace fragscope {

namespace {

constexpr double kPartitionSumTol = 1e-12;

void check_epsilon(const DislocationModel& model, double epsilon) {
    if (epsilon < 0.0 || epsilon >= 0.5)
        throw PreconditionError("truncation epsilon must lie in [0, 1/2)");
    if (epsilon == 0.0 && !model.finite_activity())
        throw PreconditionError("epsilon = 0 (no truncation) requires a finite dislocation measure");
}

} // namespace

void PartitionSample::validate() const {
    if (sizes.size() < 2) throw InvariantError("partition must have at least 2 blocks");
    double sum = 0.0;
    double prev = 1.0;
    for (double s : sizes) {
        if (!(s > 0.0 && s < 1.0)) throw InvariantError("partition block outside (0,1)");
        if (s > prev) throw InvariantError("partition blocks not descending");
        prev = s;
        sum += s;
    }
    if (std::fabs(sum - 1.0) > kPartitionSumTol)
        throw InvariantError("partition mass not conserved");
}

DislocationModel DislocationModel::binary_uniform() {
    DislocationModel m;
    m.kind = ModelKind::BinaryUniform;
    m.total_mass = 1.0;
    return m;
}

DislocationModel DislocationModel::ternary_deterministic() {
    DislocationModel m;
    m.kind = ModelKind::TernaryDeterministic;
    m.total_mass = 1.0;
    return m;
}

DislocationModel DislocationModel::binary_powerlaw(double a) {
    if (!(a > 1.0 && a < 2.0))
        throw PreconditionError("binary-powerlaw exponent must lie in (1, 2)");
    DislocationModel m;
    m.kind = ModelKind::BinaryPowerlaw;
    m.powerlaw_a = a;
    m.total_mass = std::numeric_limits<double>::infinity();
    return m;
}

DislocationModel DislocationModel::custom_finite(std::vector<CustomAtom> atoms) {
    if (atoms.empty()) throw PreconditionError("custom-finite model needs at least one atom");
    DislocationModel m;
    m.kind = ModelKind::CustomFinite;
    double mass = 0.0;
    for (auto& atom : atoms) {
        if (!(atom.rate > 0.0)) throw PreconditionError("custom atom rate must be positive");
        if (atom.sizes.size() < 2) throw PreconditionError("custom atom must have >= 2 blocks");
        double sum = 0.0;
        for (double s : atom.sizes) {
            if (!(s > 0.0 && s < 1.0)) throw PreconditionError("custom atom block outside (0,1)");
            sum += s;
        }
        if (std::fabs(sum - 1.0) > kPartitionSumTol)
            throw PreconditionError("custom atom blocks must sum to 1");
        std::sort(atom.sizes.begin(), atom.sizes.end(), std::greater<double>());
        mass += atom.rate;
    }
    m.atoms = std::move(atoms);
    m.total_mass = mass;
    return m;
}

double DislocationModel::p_lower() const {
    switch (kind) {
        case ModelKind::BinaryUniform: return -2.0;
        case ModelKind::TernaryDeterministic: return -std::numeric_limits<double>::infinity();
        case ModelKind::BinaryPowerlaw: return powerlaw_a - 2.0;
        case ModelKind::CustomFinite: return -std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

std::string DislocationModel::kind_name() const {
    switch (kind) {
        case ModelKind::BinaryUniform: return "binary-uniform";
        case ModelKind::TernaryDeterministic: return "ternary-deterministic";
        case ModelKind::BinaryPowerlaw: return "binary-powerlaw";
        case ModelKind::CustomFinite: return "custom-finite";
    }
    return "?";
}

double truncated_rate(const DislocationModel& model, double epsilon) {
    check_epsilon(model, epsilon);
    switch (model.kind) {
        case ModelKind::BinaryUniform:
            // split point restricted to (eps, 1-eps)
            return 1.0 - 2.0 * epsilon;
        case ModelKind::TernaryDeterministic:
            // single atom with 1 - largest = 2/3
            return epsilon < 2.0 / 3.0 ? 1.0 : 0.0;
        case ModelKind::BinaryPowerlaw: {
            const double a = model.powerlaw_a;
            if (epsilon == 0.0) return std::numeric_limits<double>::infinity();
            // integral of s^-a over (eps, 1-eps)
            return (std::pow(epsilon, 1.0 - a) - std::pow(1.0 - epsilon, 1.0 - a)) / (a - 1.0);
        }
        case ModelKind::CustomFinite: {
            double rate = 0.0;
            for (const auto& atom : model.atoms)
                if (1.0 - atom.sizes.front() > epsilon) rate += atom.rate;
            return rate;
        }
    }
    return 0.0;
}

double integrability_mass(const DislocationModel& model) {
    switch (model.kind) {
        case ModelKind::BinaryUniform:
            return 0.25;  // integral of min(s, 1-s) ds
        case ModelKind::TernaryDeterministic:
            return 2.0 / 3.0;
        case ModelKind::BinaryPowerlaw: {
            const double a = model.powerlaw_a;
            // int_0^1/2 s^{1-a} ds + int_1/2^1 (1-s) s^-a ds
            const double left = std::pow(0.5, 2.0 - a) / (2.0 - a);
            const double right =
                integrate([a](double s) { return (1.0 - s) * std::pow(s, -a); }, 0.5, 1.0).value;
            return left + right;
        }
        case ModelKind::CustomFinite: {
            double acc = 0.0;
            for (const auto& atom : model.atoms) acc += atom.rate * (1.0 - atom.sizes.front());
            return acc;
        }
    }
    return 0.0;
}

TruncationPolicy TruncationPolicy::make(const DislocationModel& model, double epsilon) {
    TruncationPolicy p;
    p.epsilon = epsilon;
    p.effective_rate = truncated_rate(model, epsilon);
    return p;
}

double sample_split_point(const DislocationModel& model, const TruncationPolicy& policy, Rng& rng) {
    const double eps = policy.epsilon;
    switch (model.kind) {
        case ModelKind::BinaryUniform:
            return eps + (1.0 - 2.0 * eps) * rng.uniform01();
        case ModelKind::BinaryPowerlaw: {
            // inverse CDF of the density s^-a restricted to (eps, 1-eps)
            const double a = model.powerlaw_a;
            const double lo = std::pow(eps, 1.0 - a);
            const double hi = std::pow(1.0 - eps, 1.0 - a);
            const double v = lo - rng.uniform01() * (lo - hi);
            return std::pow(v, 1.0 / (1.0 - a));
        }
        default:
            throw PreconditionError("sample_split_point: model has no split-point parameter");
    }
}

void sample_partition_into(const DislocationModel& model, const TruncationPolicy& policy, Rng& rng,
                           std::vector<double>& out) {
    if (!(policy.effective_rate > 0.0))
        throw PreconditionError("degenerate-truncation: truncated measure has zero mass");
    out.clear();
    switch (model.kind) {
        case ModelKind::BinaryUniform:
        case ModelKind::BinaryPowerlaw: {
            const double s = sample_split_point(model, policy, rng);
            out.push_back(std::max(s, 1.0 - s));
            out.push_back(std::min(s, 1.0 - s));
            break;
        }
        case ModelKind::TernaryDeterministic: {
            const double third = 1.0 / 3.0;
            out.assign(3, third);
            break;
        }
        case ModelKind::CustomFinite: {
            double pick = rng.uniform01() * policy.effective_rate;
            const CustomAtom* chosen = nullptr;
            for (const auto& atom : model.atoms) {
                if (1.0 - atom.sizes.front() <= policy.epsilon) continue;
                chosen = &atom;
                pick -= atom.rate;
                if (pick <= 0.0) break;
            }
            if (chosen == nullptr)
                throw PreconditionError("degenerate-truncation: no atom inside the region");
            out = chosen->sizes;
            break;
        }
    }
}

PartitionSample sample_partition(const DislocationModel& model, const TruncationPolicy& policy,
                                 Rng& rng) {
    PartitionSample sample;
    sample_partition_into(model, policy, rng, sample.sizes);
    sample.validate();
    return sample;
}

} // namespace fragscope
