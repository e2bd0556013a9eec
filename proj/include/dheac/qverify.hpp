#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "dheac/netgen.hpp"
#include "dheac/partition.hpp"
#include "dheac/rng.hpp"
#include "dheac/stats.hpp"

namespace dheac {

// Basis label of the joint outer/ancilla register: a winner set and its quotas.
// `quotas` is aligned with `winners`; empty for a bare Dicke state.
struct Outcome {
    std::vector<std::size_t> winners;
    QuotaVector quotas;

    auto operator<=>(const Outcome&) const = default;
};

using Amplitude = std::complex<double>;

/// Sparse amplitude map over labelled outcomes.
///
/// Only outcomes with support are stored, so a state over C(m, K) * |Omega|
/// labels never materialises the 2^(m + ell_anc) register. Amplitudes are
/// real and nonnegative in practice; the complex slot is kept for phase-aware
/// extensions.
class SparseState {
public:
    SparseState() = default;
    SparseState(std::size_t m, std::size_t K) : m_(m), K_(K) {}

    std::size_t m() const { return m_; }
    std::size_t K() const { return K_; }
    const std::map<Outcome, Amplitude>& amplitudes() const { return amplitudes_; }
    std::size_t size() const { return amplitudes_.size(); }

    void set_amplitude(const Outcome& label, Amplitude amp) { amplitudes_[label] = amp; }
    Amplitude amplitude(const Outcome& label) const;

    double norm_squared() const;
    bool is_normalized(double tol = 1e-12) const;

private:
    std::size_t m_ = 0;
    std::size_t K_ = 0;
    std::map<Outcome, Amplitude> amplitudes_;
};

// Largest C(m, K) * max|Omega_S| the sparse model accepts.
inline constexpr std::uint64_t kSparseOutcomeLimit = 1'000'000;
inline constexpr std::size_t kDickeMaxQubits = 20;

// |D^m_K>: amplitude 1/sqrt(C(m,K)) on each weight-K subset.
SparseState build_dicke(std::size_t m, std::size_t K);

/// Outer Dicke register with the feasible quota vectors loaded conditionally.
///
/// Each branch S carries 1/sqrt(C(m,K)) and splits evenly over Omega_S, so
/// the winner-set marginal is exactly the Dicke distribution whatever the
/// size of Omega_S. Throws Infeasible if some Omega_S is empty and
/// CapacityError when the state would exceed kSparseOutcomeLimit labels.
SparseState build_embedded(const NetworkConfig& net, Capacity k_req, std::size_t K);

// Samples one outcome with probability |amplitude|^2; throws InvariantViolation
// on an unnormalised state.
Outcome measure(const SparseState& state, RandomStream& rng);

// Precomputed sampler for repeated draws from one state.
class Measurement {
public:
    explicit Measurement(const SparseState& state);
    const Outcome& draw(RandomStream& rng) const;
    std::size_t outcome_count() const { return labels_.size(); }

private:
    std::vector<const Outcome*> labels_;
    std::vector<double> cumulative_;
};

// Probability of each winner set, summed over quotas.
std::map<std::vector<std::size_t>, double> marginal_outer(const SparseState& state);

// Distribution over quota vectors given the winner set, renormalised.
std::map<QuotaVector, double> conditional_inner(const SparseState& state, const std::vector<std::size_t>& winners);

// |S| = K, S ascending and in range, quotas within caps and summing to k_req.
bool is_feasible_label(const Outcome& label, const NetworkConfig& net, Capacity k_req, std::size_t K);

// Every supported label is a feasible allocation of k_req over net; returns
// the number of labels that are not.
std::size_t count_infeasible(const SparseState& state, const NetworkConfig& net, Capacity k_req);

// Per-QLAN win probability of a node when quotas follow the state's ancilla
// distribution: sum over outcomes of prob * v_i / n_i.
std::vector<double> qlan_probs_from_state(const SparseState& state, const NetworkConfig& net);

// Analytic and sampled checks of an embedded state.
struct VerificationReport {
    std::size_t m = 0;
    std::size_t K = 0;
    Capacity k_req = 0;
    std::uint64_t draws = 0;
    std::size_t outcomes = 0;
    std::size_t winner_sets = 0;
    double max_outer_deviation = 0.0;
    double max_conditional_deviation = 0.0;
    ChiSquareResult outer;
    // Per-winner-set statistics summed into a single test.
    ChiSquareResult conditional;
    double worst_subset_p = 1.0;
    std::size_t infeasible_labels = 0;
    std::size_t infeasible_draws = 0;
    // Node-level Jain when quotas follow the ancilla distribution vs. largest-remainder rounding.
    double jain_measured_quotas = 0.0;
    double jain_rounded_quotas = 0.0;
    bool rounded_available = false;

    bool passed(double significance, double tolerance) const;
};

VerificationReport verify_embedded(const SparseState& state, const NetworkConfig& net, Capacity k_req,
                                   std::uint64_t draws, std::uint64_t seed);

}  // namespace dheac
