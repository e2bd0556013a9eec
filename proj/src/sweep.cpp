#include "dheac/sweep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <tuple>

#include "dheac/baselines.hpp"
#include "dheac/errors.hpp"
#include "dheac/parallel.hpp"
#include "dheac/partition.hpp"

namespace dheac {
namespace {

template <typename T>
void merge_list(const nlohmann::json& j, const char* key, std::vector<T>& target) {
    if (j.contains(key)) target = j.at(key).get<std::vector<T>>();
}

template <typename T>
void merge_value(const nlohmann::json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

// Stream id for a fairness point, derived from its coordinates so that the
// same point yields the same estimate in every table it appears in.
std::uint64_t coordinate_stream(std::size_t m, double skew, double demand) {
    return mix64(mix64(m) ^ std::bit_cast<std::uint64_t>(skew)) ^ std::bit_cast<std::uint64_t>(demand);
}

}  // namespace

std::size_t SweepSpec::point_count() const {
    return m_values.size() * q_values.size() * demand_values.size() * skew_values.size();
}

void SweepSpec::validate() const {
    if (m_values.empty() || q_values.empty() || demand_values.empty() || skew_values.empty())
        throw InvalidArgument("every grid axis needs at least one value");
    for (std::size_t m : m_values)
        if (m == 0) throw InvalidArgument("QLAN counts must be >= 1");
    for (double q : q_values)
        if (!(q >= 0.0 && q < 1.0)) throw InvalidArgument("loss values must lie in [0, 1)");
    for (double d : demand_values)
        if (!(d > 0.0 && d <= 1.0)) throw InvalidArgument("demand values must lie in (0, 1]");
    for (double s : skew_values)
        if (!(s >= 0.0)) throw InvalidArgument("skew values must be >= 0");
    if (total && *total < 1) throw InvalidArgument("total capacity must be >= 1");
    if (!total && capacity_per_qlan < 1) throw InvalidArgument("capacity per QLAN must be >= 1");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (!optimistic && !conservative) throw InvalidArgument("select at least one accounting mode");
    ModelParams p = params;
    p.q = 0.0;
    p.validate();
}

nlohmann::ordered_json SweepSpec::to_json() const {
    nlohmann::ordered_json j;
    j["m_values"] = m_values;
    j["q_values"] = q_values;
    j["demand_values"] = demand_values;
    j["skew_values"] = skew_values;
    j["capacity_per_qlan"] = capacity_per_qlan;
    j["total"] = total ? nlohmann::ordered_json(*total) : nlohmann::ordered_json(nullptr);
    j["trials"] = trials;
    j["seed"] = seed;
    j["mode"] = analytic && monte_carlo ? "both" : (monte_carlo ? "mc" : "analytic");
    j["chi"] = optimistic && conservative ? "both" : (optimistic ? "optimistic" : "conservative");
    j["M"] = params.max_attempts;
    j["t_gen"] = params.t_gen;
    j["t_dist"] = params.t_dist;
    j["t_meas"] = params.t_meas;
    j["t_ctl"] = params.t_ctl;
    j["r"] = params.round_trips;
    j["beta"] = params.beta;
    return j;
}

void SweepSpec::merge_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("grid config must be a JSON object");
    static const std::vector<std::string> known = {"m_values", "q_values", "demand_values", "skew_values",
                                                   "capacity_per_qlan", "total", "trials", "seed", "mode",
                                                   "chi", "M", "t_gen", "t_dist", "t_meas", "t_ctl", "r", "beta"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InvalidArgument("unknown grid config key '" + key + "'");
    merge_list(j, "m_values", m_values);
    merge_list(j, "q_values", q_values);
    merge_list(j, "demand_values", demand_values);
    merge_list(j, "skew_values", skew_values);
    merge_value(j, "capacity_per_qlan", capacity_per_qlan);
    if (j.contains("total")) {
        if (j.at("total").is_null()) total.reset();
        else total = j.at("total").get<Capacity>();
    }
    merge_value(j, "trials", trials);
    merge_value(j, "seed", seed);
    if (j.contains("mode")) {
        const auto mode = j.at("mode").get<std::string>();
        if (mode != "analytic" && mode != "mc" && mode != "both") throw InvalidArgument("mode must be analytic, mc or both");
        analytic = mode != "mc";
        monte_carlo = mode != "analytic";
    }
    if (j.contains("chi")) {
        const auto chi = j.at("chi").get<std::string>();
        if (chi != "optimistic" && chi != "conservative" && chi != "both")
            throw InvalidArgument("chi must be optimistic, conservative or both");
        optimistic = chi != "conservative";
        conservative = chi != "optimistic";
    }
    merge_value(j, "M", params.max_attempts);
    merge_value(j, "t_gen", params.t_gen);
    merge_value(j, "t_dist", params.t_dist);
    merge_value(j, "t_meas", params.t_meas);
    merge_value(j, "t_ctl", params.t_ctl);
    merge_value(j, "r", params.round_trips);
    merge_value(j, "beta", params.beta);
}

std::vector<GridPoint> enumerate_grid(const SweepSpec& spec) {
    std::vector<GridPoint> points;
    points.reserve(spec.point_count());
    for (std::size_t m : spec.m_values)
        for (double q : spec.q_values)
            for (double d : spec.demand_values)
                for (double s : spec.skew_values) points.push_back({points.size(), m, q, d, s});
    return points;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<GridPoint> grid = enumerate_grid(spec);
    std::vector<std::vector<ResultRow>> per_point(grid.size());

    parallel_for(grid.size(), spec.workers, [&](std::size_t idx) {
        const GridPoint& pt = grid[idx];
        ResultRow base;
        base.mode = "analytic";
        base.point = pt;
        base.seed = spec.seed;
        base.total = spec.total_for(pt.m);
        ModelParams params = spec.params;
        params.q = pt.q;
        const NetworkConfig net = generate_network(pt.m, pt.skew, base.total);
        base.k_req = demand_to_kreq(pt.demand, base.total);
        const Request req{base.k_req, params.max_attempts, pt.demand};
        try {
            base.metrics = evaluate_metrics(net, base.k_req, params);
            base.feasible = true;
        } catch (const ResourceShortage&) {
            base.feasible = false;
        }
        std::vector<ResultRow>& rows = per_point[idx];
        if (!base.feasible) {
            if (spec.analytic) rows.push_back(base);
            return;
        }
        const BaselineResult b1 = b1_evaluate(net, req, params);
        base.b1_applicable = b1.applicable;
        base.P_b1 = b1.P;
        base.L_b1 = b1.L;
        base.THR_b1 = b1.THR;
        try {
            base.jain_exact = jain_index(exact_node_probs(net, req, params.beta));
        } catch (const CapacityError&) {
            base.jain_exact.reset();
        }
        if (spec.analytic) rows.push_back(base);
        if (spec.monte_carlo) {
            const ProtocolPlan plan = plan_protocol(net, req, params);
            for (Accounting mode : {Accounting::optimistic, Accounting::conservative}) {
                if (mode == Accounting::optimistic ? !spec.optimistic : !spec.conservative) continue;
                ResultRow row = base;
                row.mode = "mc";
                row.accounting = to_string(mode);
                const McOptions options{spec.seed, pt.index * 2 + (mode == Accounting::optimistic ? 0 : 1), 1};
                row.mc = estimate_success(plan, mode, spec.trials, options);
                rows.push_back(std::move(row));
            }
        }
    });

    std::vector<ResultRow> rows;
    for (auto& chunk : per_point)
        for (auto& row : chunk) rows.push_back(std::move(row));
    return rows;
}

void write_provenance(std::ostream& out, const std::string& command, const nlohmann::ordered_json& config) {
    out << "# dheac " << kVersion << " " << command << "\n";
    out << "# config: " << config.dump() << "\n";
    out << "# seed: " << (config.contains("seed") ? config.at("seed").dump() : "none") << "\n";
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<ResultRow>& rows) {
    write_provenance(out, "sweep", spec.to_json());
    out << "mode,accounting,point,m,q,demand,skew,total,k_req,feasible,K,ell_anc,k_max_b2,"
           "P_lower,P_upper,P_b2,L_d_optimistic,L_d_conservative,L_b2,THR_lower,THR_upper,THR_b2,"
           "L_ratio_optimistic,L_ratio_conservative,THR_ratio_optimistic,THR_ratio_conservative,"
           "b1_applicable,P_b1,L_b1,THR_b1,jain_exact,mc_success,mc_success_se,mc_latency,mc_latency_se,"
           "mc_throughput,trials,seed\n";
    for (const ResultRow& r : rows) {
        const MetricsRecord& mr = r.metrics;
        out << r.mode << ',' << r.accounting << ',' << r.point.index << ',' << r.point.m << ','
            << format_number(r.point.q) << ',' << format_number(r.point.demand) << ','
            << format_number(r.point.skew) << ',' << r.total << ',' << r.k_req << ',' << (r.feasible ? 1 : 0);
        if (r.feasible) {
            out << ',' << mr.K << ',' << mr.ell_anc << ',' << mr.k_max_b2;
            for (double v : {mr.P_lower, mr.P_upper, mr.P_b2, mr.L_d_optimistic, mr.L_d_conservative, mr.L_b2,
                             mr.THR_lower, mr.THR_upper, mr.THR_b2, mr.L_d_optimistic / mr.L_b2,
                             mr.L_d_conservative / mr.L_b2, mr.THR_b2 / mr.THR_upper, mr.THR_b2 / mr.THR_lower})
                out << ',' << format_number(v);
            out << ',' << (r.b1_applicable ? 1 : 0);
            if (r.b1_applicable)
                out << ',' << format_number(r.P_b1) << ',' << format_number(r.L_b1) << ',' << format_number(r.THR_b1);
            else
                out << ",,,";
            out << ',' << opt_number(r.jain_exact);
        } else {
            out << std::string(21, ',');
        }
        if (r.mc) {
            out << ',' << format_number(r.mc->rate) << ',' << format_number(r.mc->rate_stderr) << ','
                << format_number(r.mc->mean_latency) << ',' << format_number(r.mc->latency_stderr) << ','
                << format_number(r.mc->throughput) << ',' << r.mc->trials;
        } else {
            out << ",,,,,,";
        }
        out << ',' << r.seed << '\n';
    }
}

std::vector<BreakevenCell> run_breakeven(const SweepSpec& spec) {
    spec.validate();
    const double skew = spec.skew_values.front();
    const double demand = spec.demand_values.front();
    std::vector<BreakevenCell> cells;
    for (std::size_t m : spec.m_values)
        for (double q : spec.q_values) cells.push_back({m, q, spec.total_for(m), 0, false, {}, 0.0, 0.0});

    parallel_for(cells.size(), spec.workers, [&](std::size_t idx) {
        BreakevenCell& cell = cells[idx];
        ModelParams params = spec.params;
        params.q = cell.q;
        const NetworkConfig net = generate_network(cell.m, skew, cell.total);
        cell.k_req = demand_to_kreq(demand, cell.total);
        try {
            cell.metrics = evaluate_metrics(net, cell.k_req, params);
            cell.feasible = true;
            cell.ratio_optimistic = cell.metrics.THR_b2 / cell.metrics.THR_upper;
            cell.ratio_conservative = cell.metrics.THR_b2 / cell.metrics.THR_lower;
        } catch (const ResourceShortage&) {
            cell.feasible = false;
        }
    });
    return cells;
}

void write_breakeven_csv(std::ostream& out, const SweepSpec& spec, const std::vector<BreakevenCell>& cells) {
    auto config = spec.to_json();
    config["skew"] = spec.skew_values.front();
    config["demand"] = spec.demand_values.front();
    write_provenance(out, "breakeven", config);
    out << "m,q,skew,demand,total,k_req,feasible,K,ell_anc,THR_b2,THR_upper,THR_lower,"
           "ratio_optimistic,ratio_conservative\n";
    for (const BreakevenCell& c : cells) {
        out << c.m << ',' << format_number(c.q) << ',' << format_number(spec.skew_values.front()) << ','
            << format_number(spec.demand_values.front()) << ',' << c.total << ',' << c.k_req << ','
            << (c.feasible ? 1 : 0);
        if (c.feasible) {
            out << ',' << c.metrics.K << ',' << c.metrics.ell_anc << ',' << format_number(c.metrics.THR_b2) << ','
                << format_number(c.metrics.THR_upper) << ',' << format_number(c.metrics.THR_lower) << ','
                << format_number(c.ratio_optimistic) << ',' << format_number(c.ratio_conservative);
        } else {
            out << ",,,,,,,";
        }
        out << '\n';
    }
}

std::vector<FairnessPoint> run_fairness(const FairnessSpec& spec) {
    const SweepSpec& grid = spec.grid;
    grid.validate();
    std::vector<FairnessPoint> points;
    auto add = [&](const char* table, std::size_t m, double skew, double demand) {
        FairnessPoint p;
        p.table = table;
        p.m = m;
        p.skew = skew;
        p.demand = demand;
        points.push_back(std::move(p));
    };
    for (double s : grid.skew_values)
        for (double d : grid.demand_values) add("skew_demand", spec.table_m, s, d);
    for (std::size_t m : grid.m_values)
        for (double s : grid.skew_values) add("heatmap", m, s, spec.heatmap_demand);
    for (double s : grid.skew_values) add("ecdf", spec.ecdf_m, s, spec.ecdf_demand);

    // Evaluate each distinct coordinate once; tables share results.
    std::map<std::tuple<std::size_t, double, double>, std::size_t> first;
    std::vector<std::size_t> unique;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (first.emplace(std::tuple(points[i].m, points[i].skew, points[i].demand), i).second) unique.push_back(i);

    parallel_for(unique.size(), grid.workers, [&](std::size_t u) {
        FairnessPoint& p = points[unique[u]];
        p.total = grid.total_for(p.m);
        const NetworkConfig net = generate_network(p.m, p.skew, p.total);
        p.k_req = demand_to_kreq(p.demand, p.total);
        const Request req{p.k_req, grid.params.max_attempts, p.demand};
        try {
            p.K = safe_select_k(p.k_req, net.caps, grid.params.beta);
            p.feasible = true;
        } catch (const ResourceShortage&) {
            p.feasible = false;
            return;
        }
        const McOptions options{grid.seed, coordinate_stream(p.m, p.skew, p.demand), 1};
        p.report = estimate_fairness(net, req, grid.params.beta, grid.trials, options);
        try {
            p.jain_exact = jain_index(exact_node_probs(net, req, grid.params.beta));
        } catch (const CapacityError&) {
            p.jain_exact.reset();
        }
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t src = first.at(std::tuple(points[i].m, points[i].skew, points[i].demand));
        if (src != i) {
            const std::string table = points[i].table;
            points[i] = points[src];
            points[i].table = table;
        }
        if (points[i].table == "ecdf") {
            points[i].ecdf_file = "ecdf_m" + std::to_string(points[i].m) + "_d" + format_number(points[i].demand) +
                                  "_s" + format_number(points[i].skew) + ".csv";
        }
    }
    return points;
}

void write_fairness_csv(std::ostream& out, const FairnessSpec& spec, const std::vector<FairnessPoint>& points) {
    auto config = spec.grid.to_json();
    config.erase("q_values");
    config.erase("mode");
    config.erase("chi");
    config["table_m"] = spec.table_m;
    config["heatmap_demand"] = spec.heatmap_demand;
    config["ecdf_m"] = spec.ecdf_m;
    config["ecdf_demand"] = spec.ecdf_demand;
    write_provenance(out, "fairness", config);
    out << "table,m,skew,demand,total,k_req,feasible,K,trials,jain,jain_exact,min_prob,max_prob,ecdf_file\n";
    for (const FairnessPoint& p : points) {
        out << p.table << ',' << p.m << ',' << format_number(p.skew) << ',' << format_number(p.demand) << ','
            << p.total << ',' << p.k_req << ',' << (p.feasible ? 1 : 0);
        if (p.feasible) {
            const auto [lo, hi] = std::minmax_element(p.report.node_probs.begin(), p.report.node_probs.end());
            out << ',' << p.K << ',' << p.report.trials << ',' << format_number(p.report.jain) << ','
                << opt_number(p.jain_exact) << ',' << format_number(*lo) << ',' << format_number(*hi);
        } else {
            out << ",,,,,,";
        }
        out << ',' << p.ecdf_file << '\n';
    }
}

void write_ecdf_csv(std::ostream& out, const FairnessPoint& point) {
    out << "# dheac " << kVersion << " fairness ecdf m=" << point.m << " skew=" << format_number(point.skew)
        << " demand=" << format_number(point.demand) << " trials=" << point.report.trials << "\n";
    out << "win_probability,cumulative_fraction\n";
    for (const EcdfPoint& e : point.report.ecdf)
        out << format_number(e.value) << ',' << format_number(e.cumulative) << '\n';
}

}  // namespace dheac
