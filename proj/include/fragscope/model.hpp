#pragma once

#include <string>
#include <vector>

#include "fragscope/rng.hpp"

namespace fragscope {

// A sampled dislocation outcome: relative block sizes in descending order.
// Conservative fragmentation, so the sizes sum to one.
struct PartitionSample {
    std::vector<double> sizes;  // descending, each in (0,1), >= 2 entries

    double largest() const { return sizes.front(); }
    void validate() const;  // throws InvariantError on violation
};

enum class ModelKind { BinaryUniform, TernaryDeterministic, BinaryPowerlaw, CustomFinite };

struct CustomAtom {
    double rate;
    std::vector<double> sizes;  // descending after construction
};

// A dislocation measure on partitions of the unit interval. Built-ins:
//   binary-uniform        finite, mass 1; split point uniform on (0,1)
//   ternary-deterministic finite, mass 1; always (1/3, 1/3, 1/3)
//   binary-powerlaw(a)    infinite activity; split-point density s^-a, a in (1,2)
//   custom-finite         user-supplied (rate, partition) atoms
struct DislocationModel {
    ModelKind kind = ModelKind::BinaryUniform;
    double powerlaw_a = 0.0;        // only for BinaryPowerlaw
    std::vector<CustomAtom> atoms;  // only for CustomFinite
    double total_mass = 1.0;        // +infinity for BinaryPowerlaw

    static DislocationModel binary_uniform();
    static DislocationModel ternary_deterministic();
    static DislocationModel binary_powerlaw(double a);
    static DislocationModel custom_finite(std::vector<CustomAtom> atoms);

    bool finite_activity() const { return kind != ModelKind::BinaryPowerlaw; }

    // Left edge of the domain on which the Levy exponent is finite.
    double p_lower() const;

    std::string kind_name() const;
};

// Drops dislocations with 1 - largest <= epsilon so infinite-activity
// measures become simulable. epsilon == 0 means no truncation and is only
// valid for finite-activity models.
struct TruncationPolicy {
    double epsilon = 0.0;
    double effective_rate = 0.0;  // nu({1 - largest > epsilon})

    static TruncationPolicy make(const DislocationModel& model, double epsilon);
    static TruncationPolicy none(const DislocationModel& model) { return make(model, 0.0); }
};

// nu-mass of the region {1 - largest > epsilon}; epsilon in [0, 1/2).
double truncated_rate(const DislocationModel& model, double epsilon);

// The integral of (1 - largest) against nu; finite for every valid model.
double integrability_mass(const DislocationModel& model);

// Raw split point for the binary kinds, distributed over the truncated
// region with the model's density. Exposed for distributional tests.
double sample_split_point(const DislocationModel& model, const TruncationPolicy& policy, Rng& rng);

PartitionSample sample_partition(const DislocationModel& model, const TruncationPolicy& policy, Rng& rng);

// Allocation-free variant used by the event loop; fills `out` descending.
void sample_partition_into(const DislocationModel& model, const TruncationPolicy& policy, Rng& rng,
                           std::vector<double>& out);

} // namespace fragscope
