#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dheac/analytics.hpp"
#include "dheac/lottery.hpp"
#include "dheac/netgen.hpp"

namespace dheac {

inline constexpr const char* kVersion = "1.0.0";

// Parameter grid shared by all experiment subcommands. Defaults are the canonical grid.
struct SweepSpec {
    std::vector<std::size_t> m_values{4, 8, 16, 32};
    std::vector<double> q_values{0.01, 0.05, 0.10, 0.15};
    std::vector<double> demand_values{0.10, 0.20, 0.40, 0.60};
    std::vector<double> skew_values{0.0, 0.5, 1.0, 1.5, 2.0};
    // Sum of capacities is capacity_per_qlan * m unless `total` pins it.
    Capacity capacity_per_qlan = 10;
    std::optional<Capacity> total;
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 1;
    bool analytic = true;
    bool monte_carlo = false;
    bool optimistic = true;
    bool conservative = true;
    ModelParams params;
    // Not part of the echoed config: output must not depend on it.
    unsigned workers = 1;

    Capacity total_for(std::size_t m) const { return total ? *total : capacity_per_qlan * static_cast<Capacity>(m); }
    std::size_t point_count() const;
    void validate() const;

    nlohmann::ordered_json to_json() const;
    // Missing keys keep their current values.
    void merge_json(const nlohmann::json& j);
};

// One grid point's coordinates.
struct GridPoint {
    std::size_t index = 0;
    std::size_t m = 0;
    double q = 0.0;
    double demand = 0.0;
    double skew = 0.0;
};

// Grid points in canonical order: m, then q, then demand, then skew.
std::vector<GridPoint> enumerate_grid(const SweepSpec& spec);

struct ResultRow {
    std::string mode;
    std::string accounting;
    GridPoint point;
    Capacity total = 0;
    Capacity k_req = 0;
    bool feasible = false;
    MetricsRecord metrics;
    bool b1_applicable = false;
    double P_b1 = 0.0;
    double L_b1 = 0.0;
    double THR_b1 = 0.0;
    std::optional<double> jain_exact;
    std::optional<SuccessEstimate> mc;
    std::uint64_t seed = 0;
};

std::vector<ResultRow> run_sweep(const SweepSpec& spec);

// 10 significant digits; "inf"/"nan" for non-finite values.
std::string format_number(double value);

void write_provenance(std::ostream& out, const std::string& command, const nlohmann::ordered_json& config);
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<ResultRow>& rows);

// Throughput ratio THR_B2 / THR_D over the (m, q) plane.
struct BreakevenCell {
    std::size_t m = 0;
    double q = 0.0;
    Capacity total = 0;
    Capacity k_req = 0;
    bool feasible = false;
    MetricsRecord metrics;
    double ratio_optimistic = 0.0;
    double ratio_conservative = 0.0;
};

// Uses spec.m_values x spec.q_values at the first skew and first demand.
std::vector<BreakevenCell> run_breakeven(const SweepSpec& spec);
void write_breakeven_csv(std::ostream& out, const SweepSpec& spec, const std::vector<BreakevenCell>& cells);

struct FairnessPoint {
    std::string table;
    std::size_t m = 0;
    double skew = 0.0;
    double demand = 0.0;
    Capacity total = 0;
    Capacity k_req = 0;
    std::size_t K = 0;
    bool feasible = false;
    FairnessReport report;
    std::optional<double> jain_exact;
    std::string ecdf_file;
};

struct FairnessSpec {
    SweepSpec grid;
    // Jain-vs-skew and Jain-vs-demand tables are taken at this QLAN count.
    std::size_t table_m = 16;
    double heatmap_demand = 0.40;
    std::size_t ecdf_m = 16;
    double ecdf_demand = 0.40;
};

std::vector<FairnessPoint> run_fairness(const FairnessSpec& spec);
void write_fairness_csv(std::ostream& out, const FairnessSpec& spec, const std::vector<FairnessPoint>& points);
void write_ecdf_csv(std::ostream& out, const FairnessPoint& point);

}  // namespace dheac
