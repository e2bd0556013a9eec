#include <doctest.h>

#include <vector>

#include "dheac/stats.hpp"
#include "oracles.hpp"

using namespace dheac;
using doctest::Approx;

TEST_CASE("chi-square survival matches tabulated critical values") {
    for (std::size_t dof = 1; dof <= 20; ++dof) CHECK(chi_square_sf(oracle::chi2_crit_001(dof), dof) == Approx(0.01).epsilon(2e-3));
}

TEST_CASE("chi-square goodness of fit") {
    const std::vector<std::uint64_t> even{100, 100, 100, 100};
    const auto r = chi_square_uniform(even);
    CHECK(r.statistic == 0.0);
    CHECK(r.dof == 3);
    CHECK(r.p_value == Approx(1.0));
    const std::vector<std::uint64_t> skewed{160, 80, 80, 80};
    // (60^2 + 3 * 20^2) / 100 = 48
    CHECK(chi_square_uniform(skewed).statistic == Approx(48.0));
    CHECK_FALSE(chi_square_uniform(skewed).passes(0.01));

    const std::vector<std::uint64_t> obs{5, 0};
    const std::vector<double> probs{1.0, 0.0};
    CHECK(chi_square_gof(obs, probs).p_value == Approx(1.0));
    const std::vector<std::uint64_t> impossible{4, 1};
    CHECK(chi_square_gof(impossible, probs).p_value == 0.0);

    const std::vector<ChiSquareResult> parts{{3.0, 2, 0.0}, {4.0, 3, 0.0}};
    const auto pooled = chi_square_pool(parts);
    CHECK(pooled.statistic == 7.0);
    CHECK(pooled.dof == 5);
}

TEST_CASE("binomial_sigma") {
    CHECK(binomial_sigma(0.25, 100'000) == Approx(std::sqrt(0.1875 / 1e5)));
    CHECK(binomial_sigma(1.0, 10) == 0.0);
}
