#include "dheac/analytics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "dheac/errors.hpp"
#include "dheac/partition.hpp"

namespace dheac {

const char* to_string(Accounting mode) {
    return mode == Accounting::optimistic ? "optimistic" : "conservative";
}

void ModelParams::validate() const {
    if (!(q >= 0.0 && q < 1.0)) throw InvalidArgument("loss q must lie in [0, 1)");
    if (max_attempts < 1) throw InvalidArgument("retry limit M must be >= 1");
    for (double t : {t_gen, t_dist, t_meas, t_ctl})
        if (!(t >= 0.0)) throw InvalidArgument("time constants must be >= 0");
    if (!(round_trips >= 0.0)) throw InvalidArgument("round-trip count r must be >= 0");
    if (!(beta >= 0.0)) throw InvalidArgument("safety margin beta must be >= 0");
}

double ModelParams::unit_success() const { return 1.0 - std::pow(q, max_attempts); }

double ModelParams::expected_attempts() const {
    if (q == 0.0) return 1.0;
    return (1.0 - std::pow(q, max_attempts)) / (1.0 - q);
}

std::size_t ancilla_bits(std::span<const Capacity> caps) {
    std::size_t bits = 0;
    for (Capacity n : caps) {
        if (n < 0) throw InvalidArgument("ancilla_bits: capacities must be >= 0");
        // ceil(log2(n + 1)) is the bit width of n.
        bits += static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(n)));
    }
    return bits;
}

SuccessBounds success_bounds(Capacity k_req, std::size_t K, std::size_t m, std::size_t ell_anc,
                             const ModelParams& params) {
    const double p = params.unit_success();
    const auto k = static_cast<double>(k_req);
    return {std::pow(p, static_cast<double>(m + ell_anc) + k), std::pow(p, static_cast<double>(K) + k)};
}

double success_b2(Capacity k_req, const ModelParams& params) {
    return std::pow(params.unit_success(), static_cast<double>(k_req));
}

double latency_dheac(std::size_t m, std::size_t K, Capacity k_req, std::size_t ell_anc,
                     const ModelParams& params, Accounting mode) {
    if (K == 0) throw InvalidArgument("latency_dheac: K must be >= 1");
    const double a = params.expected_attempts();
    const double chi = mode == Accounting::conservative ? static_cast<double>(ell_anc) : 0.0;
    const auto k_bar = static_cast<double>((k_req + static_cast<Capacity>(K) - 1) / static_cast<Capacity>(K));
    const double outer = params.t_gen + a * params.t_dist * (static_cast<double>(m) + chi) + params.t_meas;
    const double inner = params.t_gen + a * params.t_dist * k_bar + params.t_meas;
    return outer + inner;
}

double latency_b2(std::size_t m, Capacity k_max, const ModelParams& params) {
    const double a = params.expected_attempts();
    return params.round_trips * static_cast<double>(m) * params.t_ctl + params.t_gen +
           a * params.t_dist * static_cast<double>(k_max) + params.t_meas;
}

double throughput(double probability, double latency_ms) {
    if (!(latency_ms > 0.0)) throw InvalidArgument("throughput: latency must be > 0");
    return probability / latency_ms;
}

double jain_index(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument("jain_index: empty vector");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : x) {
        if (v < 0.0) throw InvalidArgument("jain_index: entries must be >= 0");
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0) throw InvalidArgument("jain_index: undefined for an all-zero vector");
    return sum * sum / (static_cast<double>(x.size()) * sum_sq);
}

std::vector<EcdfPoint> ecdf(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument("ecdf: empty input");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<EcdfPoint> out;
    const auto n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        out.push_back({sorted[i], static_cast<double>(i + 1) / n});
    }
    return out;
}

MetricsRecord evaluate_metrics(const NetworkConfig& net, Capacity k_req, const ModelParams& params) {
    params.validate();
    MetricsRecord r;
    const std::size_t m = net.m();
    r.K = safe_select_k(k_req, net.caps, params.beta);
    r.ell_anc = ancilla_bits(net.caps);
    const QuotaVector b2_alloc = quota_round(k_req, net.caps);
    r.k_max_b2 = *std::max_element(b2_alloc.begin(), b2_alloc.end());

    const SuccessBounds bounds = success_bounds(k_req, r.K, m, r.ell_anc, params);
    r.P_lower = bounds.lower;
    r.P_upper = bounds.upper;
    r.P_b2 = success_b2(k_req, params);
    r.L_d_optimistic = latency_dheac(m, r.K, k_req, r.ell_anc, params, Accounting::optimistic);
    r.L_d_conservative = latency_dheac(m, r.K, k_req, r.ell_anc, params, Accounting::conservative);
    r.L_b2 = latency_b2(m, r.k_max_b2, params);
    // Latency models are expectations already, so THR = P / L directly.
    r.THR_lower = throughput(r.P_lower, r.L_d_conservative);
    r.THR_upper = throughput(r.P_upper, r.L_d_optimistic);
    r.THR_b2 = throughput(r.P_b2, r.L_b2);
    return r;
}

}  // namespace dheac
