#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dheac/netgen.hpp"

namespace dheac {

// Which outer payload the DH-EAC accounting assumes: the bare outer state
// (optimistic, chi = 0) or outer state plus all ancilla bits (conservative).
enum class Accounting { optimistic, conservative };

const char* to_string(Accounting mode);

// Loss, retry and timing parameters; times in milliseconds.
struct ModelParams {
    double q = 0.05;
    int max_attempts = 3;
    double t_gen = 2.0;
    double t_dist = 0.05;
    double t_meas = 1.0;
    double t_ctl = 0.5;
    double round_trips = 1.0;
    double beta = 0.10;

    void validate() const;

    // Per-unit delivery success within the retry budget, 1 - q^M.
    double unit_success() const;
    // Expected attempts of a geometric truncated at M, (1 - q^M) / (1 - q).
    double expected_attempts() const;
};

struct SuccessBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Closed-form metrics for one network/request point.
struct MetricsRecord {
    std::size_t K = 0;
    std::size_t ell_anc = 0;
    Capacity k_max_b2 = 0;
    double P_lower = 0.0;
    double P_upper = 0.0;
    double P_b2 = 0.0;
    double L_d_optimistic = 0.0;
    double L_d_conservative = 0.0;
    double L_b2 = 0.0;
    double THR_lower = 0.0;
    double THR_upper = 0.0;
    double THR_b2 = 0.0;
};

// Sum over QLANs of ceil(log2(n_i + 1)).
std::size_t ancilla_bits(std::span<const Capacity> caps);

// p^(K + k_req) and p^(m + ell_anc + k_req).
SuccessBounds success_bounds(Capacity k_req, std::size_t K, std::size_t m, std::size_t ell_anc,
                             const ModelParams& params);
double success_b2(Capacity k_req, const ModelParams& params);

/// Two-stage DH-EAC latency: one outer round carrying m + chi qubits, then the
/// parallel inner rounds whose largest quota is approximated by ceil(k_req / K).
double latency_dheac(std::size_t m, std::size_t K, Capacity k_req, std::size_t ell_anc,
                     const ModelParams& params, Accounting mode);

// r*m*t_ctl of classical signalling followed by one quantum delivery of k_max qubits.
double latency_b2(std::size_t m, Capacity k_max, const ModelParams& params);

double throughput(double probability, double latency_ms);

double jain_index(std::span<const double> x);

struct EcdfPoint {
    double value = 0.0;
    double cumulative = 0.0;
};

// Right-continuous empirical CDF on the distinct support points.
std::vector<EcdfPoint> ecdf(std::span<const double> x);

// Full closed-form record for a network and request under `params`.
MetricsRecord evaluate_metrics(const NetworkConfig& net, Capacity k_req, const ModelParams& params);

}  // namespace dheac
