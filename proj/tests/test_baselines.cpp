#include <doctest.h>

#include <numeric>

#include "dheac/baselines.hpp"
#include "dheac/errors.hpp"

using namespace dheac;
using doctest::Approx;

namespace {

ModelParams params_with(double q) {
    ModelParams p;
    p.q = q;
    return p;
}

Request request(Capacity k) { return Request{k, 3, 0.0}; }

}  // namespace

TEST_CASE("B1 applicability and metrics") {
    const auto net = network_from_caps({10, 5});
    CHECK_FALSE(b1_evaluate(net, request(12), params_with(0.05)).applicable);
    CHECK_FALSE(b1_evaluate(net, request(12), params_with(0.05)).allocation.has_value());

    const auto fit = b1_evaluate(net, request(8), params_with(0.0));
    CHECK(fit.applicable);
    CHECK(fit.P == 1.0);
    CHECK(fit.L == Approx(3.40).epsilon(1e-12));
    CHECK(fit.THR == Approx(1.0 / 3.40).epsilon(1e-12));

    const auto boundary = b1_evaluate(net, request(10), params_with(0.05));
    REQUIRE(boundary.allocation.has_value());
    CHECK(boundary.allocation->winners == std::vector<std::size_t>{0});
    CHECK(boundary.allocation->quotas == QuotaVector{10});

    // Ties go to the lowest index.
    const auto tie = b1_evaluate(network_from_caps({4, 9, 9}), request(5), params_with(0.0));
    CHECK(tie.allocation->winners == std::vector<std::size_t>{1});
}

TEST_CASE("B2 allocation and metrics") {
    const auto net = generate_network(16, 0.0, 160);
    const auto r = b2_evaluate(net, request(16), params_with(0.05));
    CHECK(r.applicable);
    CHECK(r.P == Approx(0.99800).epsilon(5e-6));
    CHECK(r.P == Approx(success_b2(16, params_with(0.05))).epsilon(1e-15));
    REQUIRE(r.allocation.has_value());
    CHECK(r.allocation->total() == 16);

    // Classical term r*m*t_ctl = 1 * 16 * 0.5.
    ModelParams no_ctl = params_with(0.05);
    no_ctl.round_trips = 0.0;
    const auto quantum_only = b2_evaluate(net, request(16), no_ctl);
    CHECK(r.L - quantum_only.L == Approx(8.0).epsilon(1e-12));
    const double a = no_ctl.expected_attempts();
    CHECK(quantum_only.L == Approx(2.0 + a * 0.05 * 1 + 1.0).epsilon(1e-12));

    CHECK_THROWS_AS(b2_evaluate(network_from_caps({3, 3}), request(7), params_with(0.05)), ResourceShortage);
}

TEST_CASE("B2 latency is linear in m with slope r * t_ctl") {
    ModelParams p = params_with(0.1);
    p.round_trips = 2.0;
    p.t_ctl = 0.7;
    double prev = 0.0;
    for (std::size_t m = 1; m <= 40; ++m) {
        // Same quotas for every m: one QLAN carries the whole request.
        CapacityVector caps(m, 0);
        caps[0] = 12;
        const auto r = b2_evaluate(network_from_caps(caps), request(12), p);
        if (m > 1) CHECK(r.L - prev == Approx(1.4).epsilon(1e-12));
        prev = r.L;
    }
}

TEST_CASE("B2 allocation is a feasible partition") {
    for (double s : {0.0, 0.5, 1.0, 1.5, 2.0})
        for (Capacity k : {1, 7, 33, 80, 160}) {
            const auto net = generate_network(16, s, 160);
            const auto r = b2_evaluate(net, request(k), params_with(0.05));
            CHECK(r.allocation->total() == k);
            for (std::size_t i = 0; i < net.m(); ++i) CHECK(r.allocation->quotas[i] <= net.caps[i]);
            CHECK(r.P >= success_bounds(k, 1, 16, 0, params_with(0.05)).upper);
        }
}
