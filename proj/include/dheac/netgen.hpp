#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dheac {

using Capacity = std::int64_t;
using CapacityVector = std::vector<Capacity>;

// Aggregate view of the network: available nodes per QLAN and how it was drawn.
struct NetworkConfig {
    CapacityVector caps;
    double skew = 0.0;
    Capacity total = 0;

    std::size_t m() const { return caps.size(); }
};

// An entanglement request abstracted to its size and retry limit.
struct Request {
    Capacity k_req = 1;
    int max_attempts = 3;
    double demand = 0.0;
};

/// Splits `total` nodes over `m` QLANs with Zipf weights 1/i^skew.
///
/// Each bin gets floor(total * w_i / sum(w)); the leftover units go one at a
/// time to the bins in descending weight order (lower index first on ties),
/// wrapping around if needed. The result is non-increasing and sums to total.
NetworkConfig generate_network(std::size_t m, double skew, Capacity total);

// Network with explicit capacities (skew recorded as 0).
NetworkConfig network_from_caps(CapacityVector caps);

// max(1, round-half-up(demand * total)).
Capacity demand_to_kreq(double demand, Capacity total);

Capacity sum_caps(std::span<const Capacity> caps);

}  // namespace dheac
