#include "dheac/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "dheac/errors.hpp"

namespace dheac {

double chi_square_sf(double statistic, std::size_t dof) {
    if (dof == 0) return 1.0;
    const boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> expected_probs) {
    if (observed.size() != expected_probs.size() || observed.empty())
        throw InvalidArgument("chi_square_gof: observed and expected must be nonempty and the same length");
    const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    ChiSquareResult r;
    if (n == 0.0) return r;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = n * expected_probs[i];
        if (expected <= 0.0) {
            if (observed[i] > 0) r.statistic = INFINITY;
            continue;
        }
        const double diff = static_cast<double>(observed[i]) - expected;
        r.statistic += diff * diff / expected;
    }
    r.dof = observed.size() - 1;
    r.p_value = std::isinf(r.statistic) ? 0.0 : chi_square_sf(r.statistic, r.dof);
    return r;
}

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> observed) {
    const std::vector<double> uniform(observed.size(), 1.0 / static_cast<double>(observed.size()));
    return chi_square_gof(observed, uniform);
}

ChiSquareResult chi_square_pool(std::span<const ChiSquareResult> parts) {
    ChiSquareResult r;
    for (const auto& part : parts) {
        r.statistic += part.statistic;
        r.dof += part.dof;
    }
    r.p_value = std::isinf(r.statistic) ? 0.0 : chi_square_sf(r.statistic, r.dof);
    return r;
}

double binomial_sigma(double p, std::uint64_t n) {
    if (n == 0) throw InvalidArgument("binomial_sigma: n must be >= 1");
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

}  // namespace dheac
