#include "dheac/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "dheac/errors.hpp"

namespace dheac {

Capacity Allocation::total() const { return std::accumulate(quotas.begin(), quotas.end(), Capacity{0}); }

bool PartitionSet::contains(std::span<const Capacity> v) const {
    const QuotaVector key(v.begin(), v.end());
    return std::binary_search(vectors.begin(), vectors.end(), key);
}

Capacity safe_select_target(Capacity k_req, std::span<const Capacity> caps, double beta) {
    if (!(beta >= 0.0)) throw InvalidArgument("safe_select_k: beta must be >= 0");
    const Capacity total = sum_caps(caps);
    // Subtract a hair before ceil so 1.1 * 10 = 11.000000000000002 stays 11.
    const double inflated = (1.0 + beta) * static_cast<double>(k_req);
    const auto target = static_cast<Capacity>(std::ceil(inflated - 1e-9));
    return target <= total ? std::max(target, k_req) : k_req;
}

std::size_t safe_select_k(Capacity k_req, std::span<const Capacity> caps, double beta) {
    if (k_req < 1) throw InvalidArgument("safe_select_k: k_req must be >= 1");
    if (caps.empty()) throw InvalidArgument("safe_select_k: capacity vector is empty");
    const Capacity total = sum_caps(caps);
    if (total < k_req)
        throw ResourceShortage("RESOURCE_SHORTAGE: request for " + std::to_string(k_req) +
                               " nodes exceeds total capacity " + std::to_string(total));
    const Capacity target = safe_select_target(k_req, caps, beta);

    CapacityVector ascending(caps.begin(), caps.end());
    std::sort(ascending.begin(), ascending.end());
    Capacity covered = 0;
    for (std::size_t k = 0; k < ascending.size(); ++k) {
        covered += ascending[k];
        if (covered >= target) return k + 1;
    }
    // Unreachable: target <= total.
    throw ResourceShortage("RESOURCE_SHORTAGE: coverage target not reached");
}

PartitionSet enum_partitions(Capacity k, std::span<const Capacity> caps) {
    if (k < 0) throw InvalidArgument("enum_partitions: k must be >= 0");
    if (caps.empty()) throw InvalidArgument("enum_partitions: need at least one part");
    for (Capacity c : caps)
        if (c < 0) throw InvalidArgument("enum_partitions: capacities must be >= 0");

    PartitionSet out;
    out.k = k;
    out.caps.assign(caps.begin(), caps.end());

    const std::size_t parts = caps.size();
    // suffix[i] = capacity available in positions i..K-1.
    CapacityVector suffix(parts + 1, 0);
    for (std::size_t i = parts; i-- > 0;) suffix[i] = suffix[i + 1] + caps[i];
    if (k > suffix[0]) return out;

    struct Frame {
        QuotaVector prefix;
        Capacity remaining;
        std::size_t position;
    };
    std::vector<Frame> stack;
    stack.push_back({{}, k, 0});
    while (!stack.empty()) {
        Frame frame = std::move(stack.back());
        stack.pop_back();
        if (frame.position == parts) {
            if (frame.remaining == 0) out.vectors.push_back(std::move(frame.prefix));
            continue;
        }
        const std::size_t i = frame.position;
        const Capacity hi = std::min(caps[i], frame.remaining);
        // Smallest x that leaves a coverable remainder for positions i+1..K-1.
        const Capacity lo = std::max<Capacity>(0, frame.remaining - suffix[i + 1]);
        // Push in descending x so pops come out in lexicographic order.
        for (Capacity x = hi; x >= lo; --x) {
            QuotaVector next = frame.prefix;
            next.push_back(x);
            stack.push_back({std::move(next), frame.remaining - x, i + 1});
        }
    }
    return out;
}

std::uint64_t count_partitions(Capacity k, std::span<const Capacity> caps, std::uint64_t cap) {
    if (k < 0) return 0;
    const auto width = static_cast<std::size_t>(k) + 1;
    std::vector<std::uint64_t> ways(width, 0);
    ways[0] = 1;
    for (Capacity c : caps) {
        std::vector<std::uint64_t> next(width, 0);
        for (std::size_t s = 0; s < width; ++s) {
            const std::size_t reach = std::min(s, static_cast<std::size_t>(std::max<Capacity>(c, 0)));
            std::uint64_t total = 0;
            for (std::size_t x = 0; x <= reach && total <= cap; ++x) total += ways[s - x];
            next[s] = std::min(total, cap + 1);
        }
        ways = std::move(next);
    }
    return std::min(ways.back(), cap + 1);
}

namespace {

// Floors and exact integer remainders of the proportional shares.
struct Shares {
    QuotaVector floors;
    std::vector<Capacity> remainders;
    Capacity residual = 0;
};

Shares proportional_shares(Capacity k_req, std::span<const Capacity> winner_caps) {
    if (k_req < 0) throw InvalidArgument("quota_round: k_req must be >= 0");
    if (winner_caps.empty()) throw InvalidArgument("quota_round: no winners");
    const Capacity total = sum_caps(winner_caps);
    if (total < k_req)
        throw Infeasible("quota_round: winners hold " + std::to_string(total) + " nodes, request is " +
                         std::to_string(k_req));
    Shares sh;
    sh.floors.assign(winner_caps.size(), 0);
    sh.remainders.assign(winner_caps.size(), 0);
    sh.residual = k_req;
    if (total == 0) return sh;
    // k_req * c_j = floor * total + remainder, exactly.
    for (std::size_t j = 0; j < winner_caps.size(); ++j) {
        const Capacity scaled = k_req * winner_caps[j];
        sh.floors[j] = scaled / total;
        sh.remainders[j] = scaled % total;
        sh.residual -= sh.floors[j];
    }
    return sh;
}

// Descending remainder, then descending capacity, then ascending index.
std::vector<std::size_t> remainder_order(const Shares& sh, std::span<const Capacity> winner_caps) {
    std::vector<std::size_t> order(winner_caps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tuple(-sh.remainders[a], -winner_caps[a], a) < std::tuple(-sh.remainders[b], -winner_caps[b], b);
    });
    return order;
}

bool same_rank(const Shares& sh, std::span<const Capacity> caps, std::size_t a, std::size_t b) {
    return sh.remainders[a] == sh.remainders[b] && caps[a] == caps[b];
}

// Hands out the residual one unit at a time in `order`, skipping winners at cap.
QuotaVector distribute(Shares sh, std::span<const Capacity> winner_caps, const std::vector<std::size_t>& order) {
    // Floors never exceed caps (k_req <= total), so only residual units can bind.
    while (sh.residual > 0) {
        bool placed = false;
        for (std::size_t j : order) {
            if (sh.residual == 0) break;
            if (sh.floors[j] < winner_caps[j]) {
                ++sh.floors[j];
                --sh.residual;
                placed = true;
            }
        }
        if (!placed) throw InvariantViolation("quota_round: residual units with every winner at cap");
    }
    return std::move(sh.floors);
}

}  // namespace

QuotaVector quota_round(Capacity k_req, std::span<const Capacity> winner_caps) {
    Shares sh = proportional_shares(k_req, winner_caps);
    const auto order = remainder_order(sh, winner_caps);
    return distribute(std::move(sh), winner_caps, order);
}

QuotaVector quota_round(Capacity k_req, std::span<const Capacity> winner_caps, RandomStream& rng) {
    Shares sh = proportional_shares(k_req, winner_caps);
    auto order = remainder_order(sh, winner_caps);
    // Shuffle each run of winners that tie on (remainder, capacity).
    for (std::size_t begin = 0; begin < order.size();) {
        std::size_t end = begin + 1;
        while (end < order.size() && same_rank(sh, winner_caps, order[begin], order[end])) ++end;
        for (std::size_t i = end - 1; i > begin; --i)
            std::swap(order[i], order[begin + static_cast<std::size_t>(rng.below(i - begin + 1))]);
        begin = end;
    }
    return distribute(std::move(sh), winner_caps, order);
}

std::vector<double> expected_quota_round(Capacity k_req, std::span<const Capacity> winner_caps) {
    const Shares sh = proportional_shares(k_req, winner_caps);
    const auto order = remainder_order(sh, winner_caps);
    std::vector<double> expected(sh.floors.begin(), sh.floors.end());
    Capacity residual = sh.residual;
    // residual < number of winners unless k_req equals the total, where every
    // winner ends at its cap and the tie order is irrelevant.
    if (k_req == sum_caps(winner_caps)) return {winner_caps.begin(), winner_caps.end()};
    for (std::size_t begin = 0; begin < order.size() && residual > 0;) {
        std::size_t end = begin + 1;
        while (end < order.size() && same_rank(sh, winner_caps, order[begin], order[end])) ++end;
        const auto group = static_cast<Capacity>(end - begin);
        const Capacity units = std::min(residual, group);
        for (std::size_t i = begin; i < end; ++i)
            expected[order[i]] += static_cast<double>(units) / static_cast<double>(group);
        residual -= units;
        begin = end;
    }
    return expected;
}

CapacityVector restrict_caps(std::span<const Capacity> caps, std::span<const std::size_t> subset) {
    CapacityVector out;
    out.reserve(subset.size());
    for (std::size_t i : subset) {
        if (i >= caps.size()) throw InvalidArgument("restrict_caps: QLAN index out of range");
        out.push_back(caps[i]);
    }
    return out;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    // Running products C(n-k+i, i) stay integral; stop once past cap.
    __extension__ using Wide = unsigned __int128;
    Wide value = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        value = value * (n - k + i) / i;
        if (value > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(value);
}

}  // namespace dheac
