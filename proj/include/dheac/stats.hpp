#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace dheac {

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;

    bool passes(double significance) const { return p_value >= significance; }
};

// Pearson goodness-of-fit of observed counts against expected probabilities.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> expected_probs);

ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> observed);

// Sums independent chi-square statistics (and their degrees of freedom) into one test.
ChiSquareResult chi_square_pool(std::span<const ChiSquareResult> parts);

// Upper-tail probability of a chi-square variate with `dof` degrees of freedom.
double chi_square_sf(double statistic, std::size_t dof);

// Standard error of a binomial proportion p estimated from n trials.
double binomial_sigma(double p, std::uint64_t n);

}  // namespace dheac
