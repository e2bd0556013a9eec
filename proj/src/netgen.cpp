#include "dheac/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dheac/errors.hpp"

namespace dheac {

Capacity sum_caps(std::span<const Capacity> caps) {
    return std::accumulate(caps.begin(), caps.end(), Capacity{0});
}

NetworkConfig generate_network(std::size_t m, double skew, Capacity total) {
    if (m == 0) throw InvalidArgument("generate_network: m must be >= 1");
    if (total < 0) throw InvalidArgument("generate_network: total must be >= 0");
    if (!(skew >= 0.0) || !std::isfinite(skew))
        throw InvalidArgument("generate_network: skew must be a finite value >= 0");

    std::vector<double> weights(m);
    for (std::size_t i = 0; i < m; ++i) weights[i] = std::pow(static_cast<double>(i + 1), -skew);
    const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);

    NetworkConfig net;
    net.skew = skew;
    net.total = total;
    net.caps.resize(m);
    Capacity assigned = 0;
    for (std::size_t i = 0; i < m; ++i) {
        net.caps[i] = static_cast<Capacity>(std::floor(static_cast<double>(total) * weights[i] / weight_sum));
        assigned += net.caps[i];
    }

    // Weights are strictly decreasing in i for skew > 0 and equal for skew = 0,
    // so descending-weight order with lower-index tie-break is index order.
    Capacity residual = total - assigned;
    for (std::size_t i = 0; residual > 0; i = (i + 1) % m, --residual) ++net.caps[i];
    return net;
}

NetworkConfig network_from_caps(CapacityVector caps) {
    if (caps.empty()) throw InvalidArgument("network must have at least one QLAN");
    for (Capacity c : caps)
        if (c < 0) throw InvalidArgument("capacities must be >= 0, got " + std::to_string(c));
    NetworkConfig net;
    net.total = sum_caps(caps);
    net.caps = std::move(caps);
    return net;
}

Capacity demand_to_kreq(double demand, Capacity total) {
    if (!(demand > 0.0 && demand <= 1.0))
        throw InvalidArgument("demand must lie in (0, 1], got " + std::to_string(demand));
    if (total < 1) throw InvalidArgument("demand_to_kreq: total must be >= 1");
    const double product = demand * static_cast<double>(total);
    // Snap products like 0.1*5 = 0.5000000000000001 or 0.6*40 = 23.999999999999996.
    const double snapped = std::round(product * 1e9) / 1e9;
    const auto k = static_cast<Capacity>(std::floor(snapped + 0.5));
    return std::max<Capacity>(1, k);
}

}  // namespace dheac
