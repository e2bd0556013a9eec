#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dheac/netgen.hpp"
#include "dheac/rng.hpp"

namespace dheac {

using QuotaVector = std::vector<Capacity>;

// Winner set (0-based QLAN indices, ascending) with the quota of each winner.
struct Allocation {
    std::vector<std::size_t> winners;
    QuotaVector quotas;

    Capacity total() const;
};

// All quota vectors v with sum(v) = k and 0 <= v_j <= caps_j, in lexicographic order.
struct PartitionSet {
    Capacity k = 0;
    CapacityVector caps;
    std::vector<QuotaVector> vectors;

    std::size_t size() const { return vectors.size(); }
    bool empty() const { return vectors.empty(); }
    bool contains(std::span<const Capacity> v) const;
};

/// Smallest K such that every K-subset of QLANs covers the request.
///
/// The coverage target is ceil((1 + beta) * k_req) when that still fits in the
/// total capacity, otherwise k_req itself; the margin never turns a feasible
/// request into a shortage. The K smallest capacities are the worst-case
/// K-subset, so the answer is the first ascending prefix reaching the target.
/// Throws ResourceShortage when sum(caps) < k_req.
std::size_t safe_select_k(Capacity k_req, std::span<const Capacity> caps, double beta);

// Coverage target used by safe_select_k.
Capacity safe_select_target(Capacity k_req, std::span<const Capacity> caps, double beta);

/// Enumerates every capacity-bounded composition of k over caps.
///
/// Depth-first over an explicit stack, branching x = 0..min(cap_i, remaining)
/// at position i; branches whose remaining demand exceeds the capacity left
/// to the right are pruned, which leaves the output set unchanged.
PartitionSet enum_partitions(Capacity k, std::span<const Capacity> caps);

// |enum_partitions(k, caps)| by dynamic programming, saturating at `cap` + 1.
std::uint64_t count_partitions(Capacity k, std::span<const Capacity> caps, std::uint64_t cap);

/// Capacity-proportional largest-remainder rounding of k_req over winner_caps.
///
/// Floors of k_req * c_j / sum(c) first, then one unit at a time by descending
/// fractional remainder (larger capacity, then lower index, on ties). A winner
/// at its cap is skipped and the unit moves to the next in that order.
/// Throws Infeasible when sum(winner_caps) < k_req.
QuotaVector quota_round(Capacity k_req, std::span<const Capacity> winner_caps);

// Same rounding, but winners tied on both remainder and capacity are ordered
// by a uniform random permutation drawn from `rng`, so equal QLANs are treated
// alike regardless of their index.
QuotaVector quota_round(Capacity k_req, std::span<const Capacity> winner_caps, RandomStream& rng);

// Mean of the randomised quota_round over its tie permutations.
std::vector<double> expected_quota_round(Capacity k_req, std::span<const Capacity> winner_caps);

// Gathers caps[i] for each i in `subset`.
CapacityVector restrict_caps(std::span<const Capacity> caps, std::span<const std::size_t> subset);

// C(n, k), saturating at `cap` (returns cap + 1 once the value exceeds cap).
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap);

// Calls f(subset) for every k-subset of {0..n-1}, in lexicographic order.
template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
    if (k > n) return;
    std::vector<std::size_t> subset(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = i;
    while (true) {
        f(std::span<const std::size_t>(subset));
        std::size_t i = k;
        while (i > 0 && subset[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return;
        ++subset[i - 1];
        for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
}

}  // namespace dheac
