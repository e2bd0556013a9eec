#include "dheac/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dheac/errors.hpp"

namespace dheac {

const char* to_string(Scheme scheme) { return scheme == Scheme::b1_colocate ? "B1" : "B2"; }

BaselineResult b1_evaluate(const NetworkConfig& net, const Request& req, const ModelParams& params) {
    params.validate();
    BaselineResult result;
    result.scheme = Scheme::b1_colocate;
    if (net.caps.empty()) return result;
    // max_element returns the first maximum, i.e. the lowest index on ties.
    const auto largest = std::max_element(net.caps.begin(), net.caps.end());
    if (*largest < req.k_req) return result;

    result.applicable = true;
    result.allocation = Allocation{{static_cast<std::size_t>(largest - net.caps.begin())}, {req.k_req}};
    result.P = success_b2(req.k_req, params);
    result.L = params.t_gen + params.expected_attempts() * params.t_dist * static_cast<double>(req.k_req) +
               params.t_meas;
    result.THR = result.L > 0.0 ? throughput(result.P, result.L) : 0.0;
    return result;
}

BaselineResult b2_evaluate(const NetworkConfig& net, const Request& req, const ModelParams& params) {
    params.validate();
    const Capacity total = sum_caps(net.caps);
    if (total < req.k_req)
        throw ResourceShortage("RESOURCE_SHORTAGE: B2 cannot place " + std::to_string(req.k_req) +
                               " nodes in total capacity " + std::to_string(total));
    BaselineResult result;
    result.scheme = Scheme::b2_classical;
    result.applicable = true;

    Allocation alloc;
    alloc.winners.resize(net.m());
    std::iota(alloc.winners.begin(), alloc.winners.end(), std::size_t{0});
    alloc.quotas = quota_round(req.k_req, net.caps);
    const Capacity k_max = *std::max_element(alloc.quotas.begin(), alloc.quotas.end());
    result.allocation = std::move(alloc);

    result.P = success_b2(req.k_req, params);
    result.L = latency_b2(net.m(), k_max, params);
    result.THR = result.L > 0.0 ? throughput(result.P, result.L) : 0.0;
    return result;
}

}  // namespace dheac
