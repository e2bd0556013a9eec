#include "dheac/qverify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dheac/analytics.hpp"
#include "dheac/errors.hpp"
#include "dheac/lottery.hpp"

namespace dheac {
namespace {

void require_normalized(const SparseState& state) {
    if (!state.is_normalized())
        throw InvariantViolation("state is not normalised: sum |a|^2 = " + std::to_string(state.norm_squared()));
}

}  // namespace

Amplitude SparseState::amplitude(const Outcome& label) const {
    const auto it = amplitudes_.find(label);
    return it == amplitudes_.end() ? Amplitude{} : it->second;
}

double SparseState::norm_squared() const {
    double total = 0.0;
    for (const auto& [label, amp] : amplitudes_) total += std::norm(amp);
    return total;
}

bool SparseState::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

SparseState build_dicke(std::size_t m, std::size_t K) {
    if (K < 1 || K > m) throw InvalidArgument("build_dicke: need 1 <= K <= m");
    if (m > kDickeMaxQubits)
        throw CapacityError("build_dicke: m=" + std::to_string(m) + " exceeds the sparse model limit of " +
                            std::to_string(kDickeMaxQubits) + " QLANs");
    const auto subsets = static_cast<double>(binomial_capped(m, K, UINT64_MAX - 1));
    const Amplitude amp(1.0 / std::sqrt(subsets), 0.0);
    SparseState state(m, K);
    for_each_subset(m, K, [&](std::span<const std::size_t> s) {
        state.set_amplitude(Outcome{{s.begin(), s.end()}, {}}, amp);
    });
    return state;
}

SparseState build_embedded(const NetworkConfig& net, Capacity k_req, std::size_t K) {
    const std::size_t m = net.m();
    if (K < 1 || K > m) throw InvalidArgument("build_embedded: need 1 <= K <= m");
    if (m > kDickeMaxQubits)
        throw CapacityError("build_embedded: m=" + std::to_string(m) + " exceeds the sparse model limit of " +
                            std::to_string(kDickeMaxQubits) + " QLANs; use fewer QLANs");
    const std::uint64_t subsets = binomial_capped(m, K, kSparseOutcomeLimit);
    if (subsets > kSparseOutcomeLimit)
        throw CapacityError("build_embedded: C(m, K) exceeds " + std::to_string(kSparseOutcomeLimit) +
                            " winner sets; reduce m or move K away from m/2");

    // Enumerate every Omega_S first so the guard is checked before allocating the map.
    std::vector<std::pair<std::vector<std::size_t>, PartitionSet>> branches;
    branches.reserve(subsets);
    for_each_subset(m, K, [&](std::span<const std::size_t> s) {
        std::vector<std::size_t> winners(s.begin(), s.end());
        const CapacityVector winner_caps = restrict_caps(net.caps, winners);
        const std::uint64_t omega_size = count_partitions(k_req, winner_caps, kSparseOutcomeLimit);
        if (static_cast<double>(subsets) * static_cast<double>(omega_size) > static_cast<double>(kSparseOutcomeLimit))
            throw CapacityError("build_embedded: state would exceed " + std::to_string(kSparseOutcomeLimit) +
                                " outcomes; reduce k_req, capacities or m");
        PartitionSet omega = enum_partitions(k_req, winner_caps);
        if (omega.empty()) {
            std::string label;
            for (std::size_t w : winners) label += (label.empty() ? "" : ",") + std::to_string(w + 1);
            throw Infeasible("build_embedded: no feasible quota vector for winner set {" + label +
                             "}; K does not satisfy the Safe-Select-K guarantee");
        }
        branches.emplace_back(std::move(winners), std::move(omega));
    });

    SparseState state(m, K);
    const double outer = 1.0 / std::sqrt(static_cast<double>(subsets));
    for (auto& [winners, omega] : branches) {
        const Amplitude amp(outer / std::sqrt(static_cast<double>(omega.size())), 0.0);
        for (QuotaVector& v : omega.vectors) state.set_amplitude(Outcome{winners, std::move(v)}, amp);
    }
    return state;
}

Measurement::Measurement(const SparseState& state) {
    require_normalized(state);
    labels_.reserve(state.size());
    cumulative_.reserve(state.size());
    double running = 0.0;
    for (const auto& [label, amp] : state.amplitudes()) {
        const double p = std::norm(amp);
        if (p == 0.0) continue;
        running += p;
        labels_.push_back(&label);
        cumulative_.push_back(running);
    }
    if (labels_.empty()) throw InvariantViolation("state has no support");
}

const Outcome& Measurement::draw(RandomStream& rng) const {
    // Scale by the accumulated total so rounding in the sum never leaves a gap at the top.
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), labels_.size() - 1);
    return *labels_[idx];
}

Outcome measure(const SparseState& state, RandomStream& rng) { return Measurement(state).draw(rng); }

std::map<std::vector<std::size_t>, double> marginal_outer(const SparseState& state) {
    require_normalized(state);
    std::map<std::vector<std::size_t>, double> out;
    for (const auto& [label, amp] : state.amplitudes()) out[label.winners] += std::norm(amp);
    return out;
}

std::map<QuotaVector, double> conditional_inner(const SparseState& state, const std::vector<std::size_t>& winners) {
    require_normalized(state);
    std::map<QuotaVector, double> out;
    double mass = 0.0;
    for (const auto& [label, amp] : state.amplitudes()) {
        if (label.winners != winners) continue;
        out[label.quotas] += std::norm(amp);
        mass += std::norm(amp);
    }
    if (mass == 0.0) throw InvalidArgument("conditional_inner: winner set has zero probability");
    for (auto& [v, p] : out) p /= mass;
    return out;
}

bool is_feasible_label(const Outcome& label, const NetworkConfig& net, Capacity k_req, std::size_t K) {
    if (label.winners.size() != K || label.quotas.size() != K) return false;
    if (!std::is_sorted(label.winners.begin(), label.winners.end())) return false;
    if (std::adjacent_find(label.winners.begin(), label.winners.end()) != label.winners.end()) return false;
    Capacity sum = 0;
    for (std::size_t j = 0; j < K; ++j) {
        const std::size_t i = label.winners[j];
        if (i >= net.m() || label.quotas[j] < 0 || label.quotas[j] > net.caps[i]) return false;
        sum += label.quotas[j];
    }
    return sum == k_req;
}

std::size_t count_infeasible(const SparseState& state, const NetworkConfig& net, Capacity k_req) {
    std::size_t bad = 0;
    for (const auto& [label, amp] : state.amplitudes())
        if (std::norm(amp) != 0.0 && !is_feasible_label(label, net, k_req, state.K())) ++bad;
    return bad;
}

std::vector<double> qlan_probs_from_state(const SparseState& state, const NetworkConfig& net) {
    require_normalized(state);
    std::vector<double> probs(net.m(), 0.0);
    for (const auto& [label, amp] : state.amplitudes()) {
        const double p = std::norm(amp);
        for (std::size_t j = 0; j < label.winners.size(); ++j) {
            const std::size_t i = label.winners[j];
            if (net.caps[i] > 0) probs[i] += p * static_cast<double>(label.quotas[j]) / static_cast<double>(net.caps[i]);
        }
    }
    return probs;
}

bool VerificationReport::passed(double significance, double tolerance) const {
    return max_outer_deviation <= tolerance && max_conditional_deviation <= tolerance && outer.passes(significance) &&
           conditional.passes(significance) && infeasible_labels == 0 && infeasible_draws == 0;
}

VerificationReport verify_embedded(const SparseState& state, const NetworkConfig& net, Capacity k_req,
                                   std::uint64_t draws, std::uint64_t seed) {
    VerificationReport report;
    report.m = state.m();
    report.K = state.K();
    report.k_req = k_req;
    report.draws = draws;
    report.outcomes = state.size();
    report.infeasible_labels = count_infeasible(state, net, k_req);

    const auto outer = marginal_outer(state);
    report.winner_sets = outer.size();
    const double subsets = static_cast<double>(binomial_capped(state.m(), state.K(), UINT64_MAX - 1));
    for (const auto& [winners, p] : outer) {
        report.max_outer_deviation = std::max(report.max_outer_deviation, std::abs(p - 1.0 / subsets));
        const auto cond = conditional_inner(state, winners);
        for (const auto& [v, pv] : cond)
            report.max_conditional_deviation =
                std::max(report.max_conditional_deviation, std::abs(pv - 1.0 / static_cast<double>(cond.size())));
    }
    // A winner set missing from the support is a deviation of a full 1/C(m,K).
    if (static_cast<double>(outer.size()) != subsets)
        report.max_outer_deviation = std::max(report.max_outer_deviation, 1.0 / subsets);

    // Sample and tally by label; map iteration order keeps the tallies canonical.
    std::map<Outcome, std::uint64_t> tally;
    for (const auto& [label, amp] : state.amplitudes()) tally[label] = 0;
    const Measurement sampler(state);
    for (std::uint64_t d = 0; d < draws; ++d) {
        RandomStream rng(seed, 0x71u, d);
        ++tally[sampler.draw(rng)];
    }

    std::map<std::vector<std::size_t>, std::vector<std::uint64_t>> by_winners;
    for (const auto& [label, count] : tally) {
        by_winners[label.winners].push_back(count);
        if (count > 0 && !is_feasible_label(label, net, k_req, state.K())) report.infeasible_draws += count;
    }
    std::vector<std::uint64_t> outer_counts;
    std::vector<ChiSquareResult> parts;
    for (const auto& [winners, counts] : by_winners) {
        outer_counts.push_back(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
        if (counts.size() > 1) {
            parts.push_back(chi_square_uniform(counts));
            report.worst_subset_p = std::min(report.worst_subset_p, parts.back().p_value);
        }
    }
    if (draws > 0) {
        // Winner sets the state never produced still count as cells of the uniform target.
        outer_counts.resize(static_cast<std::size_t>(subsets), 0);
        report.outer = chi_square_uniform(outer_counts);
        report.conditional = chi_square_pool(parts);
    }

    const std::vector<double> measured = expand_to_nodes(net, qlan_probs_from_state(state, net));
    if (!measured.empty()) report.jain_measured_quotas = jain_index(measured);
    try {
        const auto rounded = expand_to_nodes(net, exact_qlan_probs_for(net, k_req, state.K()));
        report.jain_rounded_quotas = jain_index(rounded);
        report.rounded_available = true;
    } catch (const std::exception&) {
        report.rounded_available = false;
    }
    return report;
}

}  // namespace dheac
