#include "dheac/lottery.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "dheac/errors.hpp"
#include "dheac/parallel.hpp"

namespace dheac {
namespace {

constexpr std::uint64_t kChunkTrials = 1024;

// Selection sampling: walk the population once, keeping each item with
// probability needed / left. Every k-subset is equally likely.
template <typename Index>
std::vector<Index> select_uniform(Index n, Index k, RandomStream& rng) {
    std::vector<Index> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    Index needed = k;
    for (Index i = 0; i < n && needed > 0; ++i) {
        const auto left = static_cast<std::uint64_t>(n - i);
        if (rng.below(left) < static_cast<std::uint64_t>(needed)) {
            chosen.push_back(i);
            --needed;
        }
    }
    return chosen;
}

// Attempts for one qubit under i.i.d. loss, truncated at M. Uses a single
// uniform: first success at attempt j iff u lies in [1 - q^(j-1), 1 - q^j).
class DeliveryModel {
public:
    explicit DeliveryModel(const ModelParams& params) : attempts_(params.max_attempts) {
        thresholds_.resize(static_cast<std::size_t>(attempts_));
        double lost = 1.0;
        for (auto& t : thresholds_) {
            lost *= params.q;
            t = 1.0 - lost;
        }
    }

    // Returns attempts used; `delivered` is false when all M attempts were lost.
    int deliver(RandomStream& rng, bool& delivered) const {
        const double u = rng.uniform();
        for (int j = 0; j < attempts_; ++j) {
            if (u < thresholds_[static_cast<std::size_t>(j)]) {
                delivered = true;
                return j + 1;
            }
        }
        delivered = false;
        return attempts_;
    }

private:
    int attempts_;
    std::vector<double> thresholds_;
};

void validate_request(const NetworkConfig& net, const Request& req) {
    if (net.caps.empty()) throw InvalidArgument("network has no QLANs");
    if (req.k_req < 1) throw InvalidArgument("k_req must be >= 1");
    if (req.max_attempts < 1) throw InvalidArgument("retry limit M must be >= 1");
}

}  // namespace

ProtocolPlan plan_protocol(const NetworkConfig& net, const Request& req, const ModelParams& params) {
    validate_request(net, req);
    params.validate();
    ProtocolPlan plan{net, req, params, 0, 0};
    plan.params.max_attempts = req.max_attempts;
    plan.K = safe_select_k(req.k_req, net.caps, params.beta);
    plan.ell_anc = ancilla_bits(net.caps);
    return plan;
}

std::vector<std::size_t> sample_outer(std::size_t m, std::size_t K, RandomStream& rng) {
    if (K < 1 || K > m)
        throw InvalidArgument("sample_outer: need 1 <= K <= m, got K=" + std::to_string(K) +
                              " m=" + std::to_string(m));
    return select_uniform<std::size_t>(m, K, rng);
}

std::vector<Capacity> sample_inner(Capacity n, Capacity k, RandomStream& rng) {
    if (k < 0 || k > n)
        throw InvalidArgument("sample_inner: need 0 <= k <= n, got k=" + std::to_string(k) +
                              " n=" + std::to_string(n));
    return select_uniform<Capacity>(n, k, rng);
}

namespace {

// Outer lottery, quota fixing and inner lottery; shared by the lossy and
// lossless paths so both consume the stream identically.
void draw_lottery(const NetworkConfig& net, const Request& req, std::size_t K, RandomStream& rng,
                  TrialOutcome& out) {
    out.allocation.winners = sample_outer(net.m(), K, rng);
    const CapacityVector winner_caps = restrict_caps(net.caps, out.allocation.winners);
    out.allocation.quotas = quota_round(req.k_req, winner_caps, rng);
    if (out.allocation.total() != req.k_req)
        throw InvariantViolation("quota vector does not sum to k_req");
    out.winning_nodes.resize(K);
    for (std::size_t j = 0; j < K; ++j) {
        if (out.allocation.quotas[j] > winner_caps[j]) throw InvariantViolation("quota exceeds capacity");
        out.winning_nodes[j] = sample_inner(winner_caps[j], out.allocation.quotas[j], rng);
    }
}

}  // namespace

TrialOutcome run_trial(const ProtocolPlan& plan, Accounting mode, RandomStream& rng) {
    TrialOutcome out;
    draw_lottery(plan.net, plan.req, plan.K, rng, out);

    const DeliveryModel delivery(plan.params);
    const std::size_t m = plan.net.m();
    bool ok = true;
    bool delivered = false;

    // Outer stage: serial delivery of the m outer qubits, then ancilla bits.
    std::vector<bool> is_winner(m, false);
    for (std::size_t w : out.allocation.winners) is_winner[w] = true;
    std::uint64_t outer_attempts = 0;
    for (std::size_t i = 0; i < m; ++i) {
        outer_attempts += static_cast<std::uint64_t>(delivery.deliver(rng, delivered));
        if (!delivered && (mode == Accounting::conservative || is_winner[i])) ok = false;
    }
    std::uint64_t outer_qubits = m;
    if (mode == Accounting::conservative) {
        for (std::size_t b = 0; b < plan.ell_anc; ++b) {
            outer_attempts += static_cast<std::uint64_t>(delivery.deliver(rng, delivered));
            ok = ok && delivered;
        }
        outer_qubits += plan.ell_anc;
    }

    // Inner stage: winners deliver their quotas in parallel.
    std::uint64_t inner_attempts = 0;
    std::uint64_t slowest_winner = 0;
    for (Capacity quota : out.allocation.quotas) {
        std::uint64_t winner_attempts = 0;
        for (Capacity u = 0; u < quota; ++u) {
            winner_attempts += static_cast<std::uint64_t>(delivery.deliver(rng, delivered));
            ok = ok && delivered;
        }
        inner_attempts += winner_attempts;
        slowest_winner = std::max(slowest_winner, winner_attempts);
    }

    const ModelParams& p = plan.params;
    out.succeeded = ok;
    out.qubits_sent = outer_qubits + static_cast<std::uint64_t>(plan.req.k_req);
    out.attempts_total = outer_attempts + inner_attempts;
    out.latency = (p.t_gen + p.t_dist * static_cast<double>(outer_attempts) + p.t_meas) +
                  (p.t_gen + p.t_dist * static_cast<double>(slowest_winner) + p.t_meas);
    return out;
}

TrialOutcome run_trial(const NetworkConfig& net, const Request& req, const ModelParams& params,
                       Accounting mode, RandomStream& rng) {
    return run_trial(plan_protocol(net, req, params), mode, rng);
}

SuccessEstimate estimate_success(const ProtocolPlan& plan, Accounting mode, std::uint64_t trials,
                                 const McOptions& options) {
    if (trials < 1) throw InvalidArgument("estimate_success: trials must be >= 1");
    struct Partial {
        std::uint64_t successes = 0;
        double latency_sum = 0.0;
        double latency_sq_sum = 0.0;
    };
    const std::size_t chunks = static_cast<std::size_t>((trials + kChunkTrials - 1) / kChunkTrials);
    std::vector<Partial> partials(chunks);
    parallel_for(chunks, options.workers, [&](std::size_t c) {
        Partial& part = partials[c];
        const std::uint64_t begin = c * kChunkTrials;
        const std::uint64_t end = std::min(trials, begin + kChunkTrials);
        for (std::uint64_t t = begin; t < end; ++t) {
            RandomStream rng(options.seed, options.stream, t);
            const TrialOutcome outcome = run_trial(plan, mode, rng);
            part.successes += outcome.succeeded ? 1 : 0;
            part.latency_sum += outcome.latency;
            part.latency_sq_sum += outcome.latency * outcome.latency;
        }
    });

    // Reduce in chunk order so the floating sums do not depend on scheduling.
    Partial total;
    for (const Partial& part : partials) {
        total.successes += part.successes;
        total.latency_sum += part.latency_sum;
        total.latency_sq_sum += part.latency_sq_sum;
    }
    SuccessEstimate est;
    const auto n = static_cast<double>(trials);
    est.trials = trials;
    est.successes = total.successes;
    est.rate = static_cast<double>(total.successes) / n;
    est.rate_stderr = std::sqrt(est.rate * (1.0 - est.rate) / n);
    est.mean_latency = total.latency_sum / n;
    const double variance = std::max(0.0, total.latency_sq_sum / n - est.mean_latency * est.mean_latency);
    est.latency_stderr = trials > 1 ? std::sqrt(variance * n / (n - 1.0) / n) : 0.0;
    est.throughput = est.mean_latency > 0.0 ? est.rate / est.mean_latency : 0.0;
    return est;
}

FairnessReport estimate_fairness(const NetworkConfig& net, const Request& req, double beta,
                                 std::uint64_t trials, const McOptions& options) {
    validate_request(net, req);
    if (trials < 1) throw InvalidArgument("estimate_fairness: trials must be >= 1");
    const std::size_t K = safe_select_k(req.k_req, net.caps, beta);

    std::vector<std::size_t> offsets(net.m() + 1, 0);
    for (std::size_t i = 0; i < net.m(); ++i) offsets[i + 1] = offsets[i] + static_cast<std::size_t>(net.caps[i]);
    const std::size_t nodes = offsets.back();

    const std::size_t chunks = static_cast<std::size_t>((trials + kChunkTrials - 1) / kChunkTrials);
    std::vector<std::vector<std::uint64_t>> partials(chunks);
    parallel_for(chunks, options.workers, [&](std::size_t c) {
        std::vector<std::uint64_t> counts(nodes, 0);
        const std::uint64_t begin = c * kChunkTrials;
        const std::uint64_t end = std::min(trials, begin + kChunkTrials);
        TrialOutcome outcome;
        for (std::uint64_t t = begin; t < end; ++t) {
            RandomStream rng(options.seed, options.stream, t);
            draw_lottery(net, req, K, rng, outcome);
            for (std::size_t j = 0; j < outcome.allocation.winners.size(); ++j) {
                const std::size_t base = offsets[outcome.allocation.winners[j]];
                for (Capacity node : outcome.winning_nodes[j]) ++counts[base + static_cast<std::size_t>(node)];
            }
        }
        partials[c] = std::move(counts);
    });

    FairnessReport report;
    report.trials = trials;
    report.win_counts.assign(nodes, 0);
    for (const auto& counts : partials)
        for (std::size_t v = 0; v < nodes; ++v) report.win_counts[v] += counts[v];
    report.node_probs.resize(nodes);
    for (std::size_t v = 0; v < nodes; ++v)
        report.node_probs[v] = static_cast<double>(report.win_counts[v]) / static_cast<double>(trials);
    report.jain = jain_index(report.node_probs);
    report.ecdf = ecdf(report.node_probs);
    return report;
}

std::vector<double> exact_qlan_probs(const NetworkConfig& net, const Request& req, double beta) {
    validate_request(net, req);
    return exact_qlan_probs_for(net, req.k_req, safe_select_k(req.k_req, net.caps, beta));
}

std::vector<double> exact_qlan_probs_for(const NetworkConfig& net, Capacity k_req, std::size_t K) {
    const std::size_t m = net.m();
    if (K < 1 || K > m) throw InvalidArgument("exact_qlan_probs: need 1 <= K <= m");
    const std::uint64_t subsets = binomial_capped(m, K, kExactSubsetLimit);
    if (subsets > kExactSubsetLimit)
        throw CapacityError("exact_node_probs: C(" + std::to_string(m) + ", " + std::to_string(K) +
                            ") exceeds " + std::to_string(kExactSubsetLimit) +
                            " subsets; use the Monte-Carlo estimator instead");

    // Tied winners share residual units evenly in expectation.
    std::vector<double> quota_sum(m, 0.0);
    for_each_subset(m, K, [&](std::span<const std::size_t> subset) {
        const std::vector<double> quotas = expected_quota_round(k_req, restrict_caps(net.caps, subset));
        for (std::size_t j = 0; j < subset.size(); ++j) quota_sum[subset[j]] += quotas[j];
    });
    std::vector<double> probs(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (net.caps[i] == 0) continue;
        probs[i] = quota_sum[i] /
                   (static_cast<double>(subsets) * static_cast<double>(net.caps[i]));
    }
    return probs;
}

std::vector<double> expand_to_nodes(const NetworkConfig& net, const std::vector<double>& per_qlan) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(sum_caps(net.caps)));
    for (std::size_t i = 0; i < net.m(); ++i) out.insert(out.end(), static_cast<std::size_t>(net.caps[i]), per_qlan[i]);
    return out;
}

std::vector<double> exact_node_probs(const NetworkConfig& net, const Request& req, double beta) {
    return expand_to_nodes(net, exact_qlan_probs(net, req, beta));
}

}  // namespace dheac
