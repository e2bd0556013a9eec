#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dheac/analytics.hpp"
#include "dheac/netgen.hpp"
#include "dheac/partition.hpp"
#include "dheac/rng.hpp"

namespace dheac {

// Result of one complete protocol round. Winner identities are only ever
// surfaced here, after every measurement of the round has been taken.
struct TrialOutcome {
    bool succeeded = false;
    Allocation allocation;
    // Local node indices (0-based within the QLAN) per winner, aligned with allocation.winners.
    std::vector<std::vector<Capacity>> winning_nodes;
    std::uint64_t qubits_sent = 0;
    std::uint64_t attempts_total = 0;
    double latency = 0.0;
};

// Quantities fixed before the lottery starts.
struct ProtocolPlan {
    NetworkConfig net;
    Request req;
    ModelParams params;
    std::size_t K = 0;
    std::size_t ell_anc = 0;
};

// Validates the inputs and runs Safe-Select-K; throws ResourceShortage.
ProtocolPlan plan_protocol(const NetworkConfig& net, const Request& req, const ModelParams& params);

// Uniform K-subset of {0..m-1}, ascending.
std::vector<std::size_t> sample_outer(std::size_t m, std::size_t K, RandomStream& rng);

// Uniform k-subset of a QLAN's n nodes, ascending.
std::vector<Capacity> sample_inner(Capacity n, Capacity k, RandomStream& rng);

/// One protocol round with loss.
///
/// Outer winners are drawn uniformly, quotas come from largest-remainder
/// rounding over the winners' capacities, and nodes are drawn uniformly inside
/// each winner. Every transmitted qubit then gets up to M attempts, each lost
/// with probability q. The outer stage transmits m qubits (plus ell_anc
/// ancilla bits in conservative mode) one after another; the inner stage runs
/// winners in parallel. Success requires the K winners' outer qubits and all
/// k_req inner qubits (optimistic), or every outer, ancilla and inner qubit
/// (conservative).
TrialOutcome run_trial(const ProtocolPlan& plan, Accounting mode, RandomStream& rng);
TrialOutcome run_trial(const NetworkConfig& net, const Request& req, const ModelParams& params,
                       Accounting mode, RandomStream& rng);

struct McOptions {
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    unsigned workers = 1;
};

struct SuccessEstimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double rate = 0.0;
    double rate_stderr = 0.0;
    double mean_latency = 0.0;
    double latency_stderr = 0.0;
    // rate / mean_latency
    double throughput = 0.0;
};

// Runs `trials` independent rounds; trial t uses stream (seed, stream, t).
SuccessEstimate estimate_success(const ProtocolPlan& plan, Accounting mode, std::uint64_t trials,
                                 const McOptions& options);

struct FairnessReport {
    std::vector<double> node_probs;
    std::vector<std::uint64_t> win_counts;
    double jain = 0.0;
    std::uint64_t trials = 0;
    std::vector<EcdfPoint> ecdf;
};

// Lottery chain without loss; fairness is conditioned on the round completing.
FairnessReport estimate_fairness(const NetworkConfig& net, const Request& req, double beta,
                                 std::uint64_t trials, const McOptions& options);

// Upper bound on C(m, K) for exact_node_probs.
inline constexpr std::uint64_t kExactSubsetLimit = 1'000'000;

/// Exact per-node win probability, expanded node by node (QLAN order).
///
/// Averages the expected quota of QLAN i, divided by n_i, over all K-subsets S
/// (ties in the rounding are shared evenly, as in the lottery). Throws
/// CapacityError when C(m, K) exceeds kExactSubsetLimit.
std::vector<double> exact_node_probs(const NetworkConfig& net, const Request& req, double beta);

// Same probabilities, one entry per QLAN (0 for empty QLANs).
std::vector<double> exact_qlan_probs(const NetworkConfig& net, const Request& req, double beta);

// Per-QLAN probabilities for an explicit winner count K.
std::vector<double> exact_qlan_probs_for(const NetworkConfig& net, Capacity k_req, std::size_t K);

// Repeats each QLAN's value caps[i] times.
std::vector<double> expand_to_nodes(const NetworkConfig& net, const std::vector<double>& per_qlan);

}  // namespace dheac
