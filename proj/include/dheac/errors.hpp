#pragma once

#include <stdexcept>
#include <string>

namespace dheac {

// Request does not fit in the aggregate capacity (RESOURCE_SHORTAGE).
class ResourceShortage : public std::runtime_error {
public:
    explicit ResourceShortage(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration or state would exceed its size guard.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Inputs admit no feasible allocation (e.g. an empty partition set).
class Infeasible : public std::runtime_error {
public:
    explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

// A structural invariant was found broken at runtime.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

using InvalidArgument = std::invalid_argument;

}  // namespace dheac
