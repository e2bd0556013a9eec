#include <doctest.h>

#include <sstream>
#include <string>

#include "dheac/errors.hpp"
#include "dheac/sweep.hpp"

using namespace dheac;

namespace {

std::size_t data_lines(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::size_t n = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        ++n;
    }
    return n;
}

std::string sweep_csv(const SweepSpec& spec) {
    std::ostringstream out;
    write_sweep_csv(out, spec, run_sweep(spec));
    return out.str();
}

}  // namespace

TEST_CASE("canonical analytic sweep has one row per grid point") {
    SweepSpec spec;
    CHECK(spec.point_count() == 320);
    const std::string csv = sweep_csv(spec);
    CHECK(data_lines(csv) == 320);
    CHECK(csv.rfind("# dheac ", 0) == 0);
}

TEST_CASE("sweep output is byte-identical across runs and worker counts") {
    SweepSpec spec;
    spec.m_values = {4, 8};
    spec.q_values = {0.05, 0.15};
    spec.demand_values = {0.4};
    spec.skew_values = {0.0, 2.0};
    spec.analytic = true;
    spec.monte_carlo = true;
    spec.trials = 3000;
    spec.seed = 99;
    spec.workers = 1;
    const std::string a = sweep_csv(spec);
    spec.workers = 8;
    const std::string b = sweep_csv(spec);
    CHECK(a == b);
    CHECK(a == sweep_csv(spec));
    // Analytic row plus one MC row per accounting mode.
    CHECK(data_lines(a) == 8 * 3);
    spec.seed = 100;
    CHECK(sweep_csv(spec) != a);
}

TEST_CASE("grid config round-trips through JSON") {
    SweepSpec spec;
    spec.m_values = {3, 5};
    spec.total = 77;
    spec.monte_carlo = true;
    spec.analytic = false;
    spec.conservative = false;
    spec.params.t_ctl = 0.25;
    SweepSpec copy;
    copy.merge_json(nlohmann::json::parse(spec.to_json().dump()));
    CHECK(copy.to_json() == spec.to_json());

    SweepSpec bad;
    CHECK_THROWS_AS(bad.merge_json(nlohmann::json::parse(R"({"m_value": [4]})")), InvalidArgument);
    CHECK_THROWS_AS(bad.merge_json(nlohmann::json::parse(R"({"mode": "fast"})")), InvalidArgument);
    bad.merge_json(nlohmann::json::parse(R"({"q_values": [1.5]})"));
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("breakeven matrix") {
    SweepSpec spec;
    spec.skew_values = {1.0};
    spec.demand_values = {0.4};
    const auto cells = run_breakeven(spec);
    CHECK(cells.size() == spec.m_values.size() * spec.q_values.size());
    const auto at = [&](std::size_t m, double q) {
        for (const auto& c : cells)
            if (c.m == m && c.q == q) return c;
        FAIL("missing cell");
        return cells.front();
    };
    CHECK(at(32, 0.15).ratio_optimistic < at(4, 0.01).ratio_optimistic);
    CHECK(at(32, 0.15).ratio_conservative < at(4, 0.01).ratio_conservative);
    // B2 leads at small m with little loss.
    CHECK(at(4, 0.01).ratio_optimistic > 1.0);
    CHECK(at(32, 0.01).ratio_optimistic < 1.0);
}

TEST_CASE("fairness tables share results between tables") {
    FairnessSpec spec;
    spec.grid.m_values = {4, 8};
    spec.grid.skew_values = {0.0, 1.0};
    spec.grid.demand_values = {0.2, 0.4};
    spec.grid.trials = 2000;
    spec.table_m = 8;
    spec.ecdf_m = 8;
    const auto points = run_fairness(spec);
    CHECK(points.size() == 4 + 4 + 2);
    const FairnessPoint* table = nullptr;
    const FairnessPoint* heat = nullptr;
    for (const auto& p : points) {
        if (p.m == 8 && p.skew == 1.0 && p.demand == 0.4) (p.table == "heatmap" ? heat : table) = &p;
    }
    REQUIRE(table != nullptr);
    REQUIRE(heat != nullptr);
    CHECK(table->report.win_counts == heat->report.win_counts);
    for (const auto& p : points) {
        CHECK(p.feasible);
        CHECK(p.jain_exact.has_value());
        CHECK((p.table == "ecdf") == !p.ecdf_file.empty());
    }
    std::ostringstream out;
    write_fairness_csv(out, spec, points);
    CHECK(data_lines(out.str()) == points.size());
}

TEST_CASE("format_number uses ten significant digits") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
    CHECK(format_number(123456789012.0) == "1.23456789e+11");
    CHECK(format_number(INFINITY) == "inf");
}
