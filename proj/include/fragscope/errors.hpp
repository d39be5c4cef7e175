#pragma once

#include <stdexcept>
#include <string>

namespace fragscope {

// Violated caller contract (bad parameters, infeasible configuration).
// The CLI maps this to exit code 1.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Internal consistency failure (e.g. mass conservation). Exit code 2.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fragscope
