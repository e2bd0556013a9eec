#pragma once

#include <optional>

#include "dheac/analytics.hpp"
#include "dheac/netgen.hpp"
#include "dheac/partition.hpp"

namespace dheac {

enum class Scheme { b1_colocate, b2_classical };

const char* to_string(Scheme scheme);

struct BaselineResult {
    Scheme scheme = Scheme::b1_colocate;
    bool applicable = false;
    std::optional<Allocation> allocation;
    double P = 0.0;
    double L = 0.0;
    double THR = 0.0;
};

// Single-layer Dicke lottery inside the largest QLAN (lowest index on ties);
// not applicable when no single QLAN can host the whole request.
BaselineResult b1_evaluate(const NetworkConfig& net, const Request& req, const ModelParams& params);

// Classical GO allocator: largest-remainder split over all m QLANs, notified
// through r*m control round trips. Throws ResourceShortage when infeasible.
BaselineResult b2_evaluate(const NetworkConfig& net, const Request& req, const ModelParams& params);

}  // namespace dheac
