// dheac: grid sweeps, fairness tables, break-even maps, quantum-model checks
// and raw Monte-Carlo dumps for the DH-EAC allocation protocol.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dheac/analytics.hpp"
#include "dheac/errors.hpp"
#include "dheac/lottery.hpp"
#include "dheac/netgen.hpp"
#include "dheac/parallel.hpp"
#include "dheac/partition.hpp"
#include "dheac/qverify.hpp"
#include "dheac/svg.hpp"
#include "dheac/sweep.hpp"

namespace fs = std::filesystem;
using namespace dheac;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kShortage = 3, kVerification = 4, kIo = 5 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr const char* kFigureMap = R"(Figure data:
  Fig. 1  latency ratio L_D/L_B2 heatmaps (q=0.05, s=1.0)
          dheac sweep --q 0.05 --skew 1.0 --out DIR --svg
          columns L_ratio_optimistic, L_ratio_conservative over m x demand
  Fig. 2  left: success probability vs loss (m=16, s=1.0)
          dheac sweep --m 16 --skew 1.0 --mode both --out DIR
          columns P_lower, P_upper, P_b2, mc_success over q
          right: throughput vs m (q=0.05, s=1.0, demand 0.40)
          dheac sweep --q 0.05 --skew 1.0 --demand 0.4 --out DIR
          columns THR_lower, THR_upper, THR_b2
  Fig. 3  break-even map THR_B2/THR_D over (m, q) (s=1.0, demand 0.40)
          dheac breakeven --out DIR --svg
  Fig. 4  Jain vs skew and Jain vs demand (m=16)
          dheac fairness --out DIR      rows with table=skew_demand
  Fig. 5  Jain heatmap over (m, s) at demand 0.40, per-node ECDF (m=16)
          dheac fairness --out DIR --svg
          rows with table=heatmap, fairness_heatmap.svg, ecdf_*.csv

Exit codes: 0 ok, 2 usage, 3 resource shortage, 4 verification failure, 5 I/O.
)";

// Flags shared by the grid-driven subcommands. Values are applied on top of
// the grid file only when given on the command line.
struct GridFlags {
    std::string grid_file;
    std::string out_dir;
    bool svg = false;
    std::vector<std::size_t> m;
    std::vector<double> q;
    std::vector<double> demand;
    std::vector<double> skew;
    Capacity capacity_per_qlan = 0;
    Capacity total = 0;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::string mode;
    std::string chi;
    int M = 0;
    double t_gen = 0, t_dist = 0, t_meas = 0, t_ctl = 0, beta = 0;
    double r = 0;
    unsigned workers = 1;
    std::map<std::string, CLI::Option*> opts;

    void attach(CLI::App& app, bool with_mode, bool with_chi) {
        opts["grid"] = app.add_option("--grid", grid_file, "JSON grid config; flags override its values")
                           ->check(CLI::ExistingFile);
        opts["out"] = app.add_option("--out", out_dir, "Output directory (default: CSV to stdout)");
        opts["svg"] = app.add_flag("--svg", svg, "Also write SVG heatmaps (needs --out)");
        opts["seed"] = app.add_option("--seed", seed, "64-bit RNG seed");
        opts["trials"] = app.add_option("--trials", trials, "Monte-Carlo trials per point")->check(CLI::PositiveNumber);
        if (with_mode)
            opts["mode"] = app.add_option("--mode", mode, "analytic, mc or both")
                               ->check(CLI::IsMember({"analytic", "mc", "both"}));
        if (with_chi)
            opts["chi"] = app.add_option("--chi", chi, "Outer payload accounting")
                              ->check(CLI::IsMember({"optimistic", "conservative", "both"}));
        opts["m"] = app.add_option("--m", m, "QLAN counts")->delimiter(',');
        opts["q"] = app.add_option("--q", q, "Per-attempt loss probabilities")->delimiter(',');
        opts["demand"] = app.add_option("--demand", demand, "Demand fractions of total capacity")->delimiter(',');
        opts["skew"] = app.add_option("--skew", skew, "Zipf capacity skews")->delimiter(',');
        opts["capacity_per_qlan"] =
            app.add_option("--capacity-per-qlan", capacity_per_qlan, "Total capacity is this times m (default 10)");
        opts["total"] = app.add_option("--total", total, "Fixed total capacity for every m");
        opts["M"] = app.add_option("--M", M, "Transmission attempts per qubit");
        opts["t_gen"] = app.add_option("--t-gen", t_gen, "GHZ generation time");
        opts["t_dist"] = app.add_option("--t-dist", t_dist, "Per-attempt distribution time");
        opts["t_meas"] = app.add_option("--t-meas", t_meas, "Measurement time");
        opts["t_ctl"] = app.add_option("--t-ctl", t_ctl, "Classical control round-trip time (B2)");
        opts["r"] = app.add_option("--r", r, "Control round trips per QLAN (B2)");
        opts["beta"] = app.add_option("--beta", beta, "Safety margin for Safe-Select-K");
        opts["workers"] = app.add_option("--workers", workers, "Worker threads (output does not depend on it)")
                              ->check(CLI::PositiveNumber);
    }

    bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }

    // Defaults, then grid file, then explicit flags.
    SweepSpec resolve(SweepSpec spec) const {
        if (!grid_file.empty()) {
            std::ifstream in(grid_file);
            if (!in) throw IoError("cannot read grid file " + grid_file);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw UsageError("grid file " + grid_file + ": " + e.what());
            }
            try {
                spec.merge_json(j);
            } catch (const nlohmann::json::exception& e) {
                throw UsageError("grid file " + grid_file + ": " + e.what());
            }
        }
        if (given("m")) spec.m_values = m;
        if (given("q")) spec.q_values = q;
        if (given("demand")) spec.demand_values = demand;
        if (given("skew")) spec.skew_values = skew;
        if (given("capacity_per_qlan")) {
            spec.capacity_per_qlan = capacity_per_qlan;
            spec.total.reset();
        }
        if (given("total")) spec.total = total;
        if (given("seed")) spec.seed = seed;
        if (given("trials")) spec.trials = trials;
        if (given("mode")) spec.merge_json({{"mode", mode}});
        if (given("chi")) spec.merge_json({{"chi", chi}});
        if (given("M")) spec.params.max_attempts = M;
        if (given("t_gen")) spec.params.t_gen = t_gen;
        if (given("t_dist")) spec.params.t_dist = t_dist;
        if (given("t_meas")) spec.params.t_meas = t_meas;
        if (given("t_ctl")) spec.params.t_ctl = t_ctl;
        if (given("r")) spec.params.round_trips = r;
        if (given("beta")) spec.params.beta = beta;
        spec.workers = workers;
        spec.validate();
        if (svg && out_dir.empty()) throw UsageError("--svg needs --out");
        return spec;
    }
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
}

// Writes `body` to dir/name, or to stdout when dir is empty.
void emit(const std::string& dir, const std::string& name, const std::function<void(std::ostream&)>& body) {
    if (dir.empty()) {
        body(std::cout);
        std::cout.flush();
        if (!std::cout) throw IoError("write to stdout failed");
        return;
    }
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    body(out);
    out.close();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

std::vector<std::string> ticks(const std::vector<double>& values) {
    std::vector<std::string> out;
    for (double v : values) out.push_back(format_number(v));
    return out;
}

std::vector<std::string> ticks(const std::vector<std::size_t>& values) {
    std::vector<std::string> out;
    for (std::size_t v : values) out.push_back(std::to_string(v));
    return out;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

int cmd_sweep(const GridFlags& flags) {
    const SweepSpec spec = flags.resolve(SweepSpec{});
    if (!flags.out_dir.empty()) ensure_dir(flags.out_dir);
    const auto rows = run_sweep(spec);
    emit(flags.out_dir, "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, spec, rows); });
    if (!flags.svg) return kOk;

    // One latency-ratio heatmap over (demand, m) per (q, skew, accounting).
    std::map<std::size_t, const ResultRow*> by_point;
    for (const ResultRow& r : rows) by_point.emplace(r.point.index, &r);
    const std::size_t nd = spec.demand_values.size(), ns = spec.skew_values.size(), nq = spec.q_values.size();
    for (std::size_t qi = 0; qi < nq; ++qi)
        for (std::size_t si = 0; si < ns; ++si)
            for (Accounting acc : {Accounting::optimistic, Accounting::conservative}) {
                if (acc == Accounting::optimistic ? !spec.optimistic : !spec.conservative) continue;
                Heatmap map;
                map.title = std::string("L_D / L_B2 (") + to_string(acc) + ", q=" + format_number(spec.q_values[qi]) +
                            ", s=" + format_number(spec.skew_values[si]) + ")";
                map.x_label = "m";
                map.y_label = "demand";
                map.x_ticks = ticks(spec.m_values);
                map.y_ticks = ticks(spec.demand_values);
                for (std::size_t di = nd; di-- > 0;) {
                    std::vector<double> line;
                    for (std::size_t mi = 0; mi < spec.m_values.size(); ++mi) {
                        const std::size_t idx = ((mi * nq + qi) * nd + di) * ns + si;
                        const ResultRow& r = *by_point.at(idx);
                        const auto& mr = r.metrics;
                        line.push_back(!r.feasible ? kNaN
                                       : acc == Accounting::optimistic ? mr.L_d_optimistic / mr.L_b2
                                                                       : mr.L_d_conservative / mr.L_b2);
                    }
                    map.values.push_back(std::move(line));
                }
                map.y_ticks.assign(map.y_ticks.rbegin(), map.y_ticks.rend());
                const std::string name = std::string("latency_ratio_") + to_string(acc) + "_q" + format_number(spec.q_values[qi]) +
                                         "_s" + format_number(spec.skew_values[si]) + ".svg";
                emit(flags.out_dir, name, [&](std::ostream& out) { write_heatmap_svg(out, map); });
            }
    return kOk;
}

int cmd_breakeven(const GridFlags& flags) {
    SweepSpec defaults;
    defaults.skew_values = {1.0};
    defaults.demand_values = {0.40};
    const SweepSpec spec = flags.resolve(defaults);
    if (spec.skew_values.size() > 1 || spec.demand_values.size() > 1)
        std::cerr << "dheac: breakeven uses the first skew and demand value only\n";
    if (!flags.out_dir.empty()) ensure_dir(flags.out_dir);
    const auto cells = run_breakeven(spec);
    emit(flags.out_dir, "breakeven.csv", [&](std::ostream& out) { write_breakeven_csv(out, spec, cells); });
    if (!flags.svg) return kOk;

    const std::size_t nq = spec.q_values.size();
    for (Accounting acc : {Accounting::optimistic, Accounting::conservative}) {
        if (acc == Accounting::optimistic ? !spec.optimistic : !spec.conservative) continue;
        Heatmap map;
        map.title = std::string("THR_B2 / THR_D (") + to_string(acc) + ", s=" + format_number(spec.skew_values.front()) +
                    ", demand=" + format_number(spec.demand_values.front()) + ")";
        map.x_label = "m";
        map.y_label = "q";
        map.x_ticks = ticks(spec.m_values);
        for (std::size_t qi = nq; qi-- > 0;) {
            map.y_ticks.push_back(format_number(spec.q_values[qi]));
            std::vector<double> line;
            for (std::size_t mi = 0; mi < spec.m_values.size(); ++mi) {
                const BreakevenCell& c = cells[mi * nq + qi];
                line.push_back(!c.feasible ? kNaN
                               : acc == Accounting::optimistic ? c.ratio_optimistic
                                                               : c.ratio_conservative);
            }
            map.values.push_back(std::move(line));
        }
        emit(flags.out_dir, std::string("breakeven_") + to_string(acc) + ".svg",
             [&](std::ostream& out) { write_heatmap_svg(out, map); });
    }
    return kOk;
}

struct FairnessFlags {
    std::size_t table_m = 16;
    double heatmap_demand = 0.40;
    std::size_t ecdf_m = 16;
    double ecdf_demand = 0.40;
};

int cmd_fairness(const GridFlags& flags, const FairnessFlags& extra) {
    FairnessSpec spec;
    spec.grid = flags.resolve(SweepSpec{});
    spec.table_m = extra.table_m;
    spec.heatmap_demand = extra.heatmap_demand;
    spec.ecdf_m = extra.ecdf_m;
    spec.ecdf_demand = extra.ecdf_demand;
    if (spec.grid.trials < 10'000)
        std::cerr << "dheac: warning: " << spec.grid.trials << " trials per point; 10000 or more recommended\n";
    if (!flags.out_dir.empty()) ensure_dir(flags.out_dir);
    const auto points = run_fairness(spec);
    emit(flags.out_dir, "fairness.csv", [&](std::ostream& out) { write_fairness_csv(out, spec, points); });
    if (flags.out_dir.empty()) return kOk;

    for (const FairnessPoint& p : points)
        if (p.table == "ecdf" && p.feasible)
            emit(flags.out_dir, p.ecdf_file, [&](std::ostream& out) { write_ecdf_csv(out, p); });
    if (!flags.svg) return kOk;

    Heatmap map;
    map.title = "Node-level Jain index (demand=" + format_number(spec.heatmap_demand) + ")";
    map.x_label = "m";
    map.y_label = "skew s";
    map.x_ticks = ticks(spec.grid.m_values);
    map.pivot = 1.0;
    const std::size_t ns = spec.grid.skew_values.size();
    std::vector<const FairnessPoint*> heat;
    for (const FairnessPoint& p : points)
        if (p.table == "heatmap") heat.push_back(&p);
    for (std::size_t si = ns; si-- > 0;) {
        map.y_ticks.push_back(format_number(spec.grid.skew_values[si]));
        std::vector<double> line;
        for (std::size_t mi = 0; mi < spec.grid.m_values.size(); ++mi) {
            const FairnessPoint& p = *heat[mi * ns + si];
            line.push_back(p.feasible ? p.report.jain : kNaN);
        }
        map.values.push_back(std::move(line));
    }
    emit(flags.out_dir, "fairness_heatmap.svg", [&](std::ostream& out) { write_heatmap_svg(out, map); });
    return kOk;
}

// A single network instance, from explicit capacities or from Zipf parameters.
struct PointFlags {
    std::vector<Capacity> caps;
    std::size_t m = 16;
    double skew = 1.0;
    Capacity total = 0;
    Capacity k_req = 0;
    double demand = 0.40;
    double beta = 0.10;
    std::map<std::string, CLI::Option*> opts;

    void attach(CLI::App& app) {
        opts["caps"] = app.add_option("--caps", caps, "Explicit QLAN capacities, comma separated")->delimiter(',');
        opts["m"] = app.add_option("--m", m, "QLAN count for a generated network")->capture_default_str();
        opts["skew"] = app.add_option("--skew", skew, "Zipf skew for a generated network")->capture_default_str();
        opts["total"] = app.add_option("--total", total, "Total capacity (default 10*m)");
        opts["k_req"] = app.add_option("--k-req", k_req, "Requested node count (overrides --demand)");
        opts["demand"] = app.add_option("--demand", demand, "Demand as a fraction of total capacity")->capture_default_str();
        opts["beta"] = app.add_option("--beta", beta, "Safety margin for Safe-Select-K")->capture_default_str();
        app.get_option("--caps")->excludes(opts["m"])->excludes(opts["skew"])->excludes(opts["total"]);
    }

    bool given(const std::string& name) const { return opts.at(name)->count() > 0; }

    NetworkConfig network() const {
        if (!caps.empty()) return network_from_caps(caps);
        const Capacity t = given("total") ? total : 10 * static_cast<Capacity>(m);
        return generate_network(m, skew, t);
    }

    Capacity request(const NetworkConfig& net) const {
        return given("k_req") ? k_req : demand_to_kreq(demand, sum_caps(net.caps));
    }
};

std::string join(const auto& values, char sep = ' ', std::size_t offset = 0) {
    std::ostringstream s;
    bool first = true;
    for (const auto& v : values) {
        if (!first) s << sep;
        s << v + offset;
        first = false;
    }
    return s.str();
}

struct VerifyFlags {
    std::uint64_t draws = 100'000;
    std::uint64_t seed = 1;
    std::size_t K = 0;
    double significance = 0.01;
    double tolerance = 1e-12;
    std::string out_dir;
    bool corrupt = false;
};

int cmd_verify_quantum(const PointFlags& point, const VerifyFlags& flags) {
    const NetworkConfig net = point.network();
    const Capacity k_req = point.request(net);
    const std::size_t K = flags.K > 0 ? flags.K : safe_select_k(k_req, net.caps, point.beta);
    SparseState state = build_embedded(net, k_req, K);
    if (flags.corrupt) {
        // Test hook: scale one amplitude so the state is no longer normalised.
        const auto& first = *state.amplitudes().begin();
        state.set_amplitude(first.first, first.second * 2.0);
    }
    const VerificationReport rep = verify_embedded(state, net, k_req, flags.draws, flags.seed);
    const bool ok = rep.passed(flags.significance, flags.tolerance);

    std::ostringstream text;
    text << "caps: " << join(net.caps, ',') << "\n"
         << "m: " << rep.m << "  K: " << rep.K << "  k_req: " << rep.k_req << "  draws: " << rep.draws << "\n"
         << "labels: " << rep.outcomes << "  winner sets: " << rep.winner_sets << "\n"
         << "outer marginal max |p - 1/C(m,K)|: " << format_number(rep.max_outer_deviation) << "\n"
         << "conditional max |p - 1/|Omega_S||: " << format_number(rep.max_conditional_deviation) << "\n"
         << "outer chi2: " << format_number(rep.outer.statistic) << " dof " << rep.outer.dof
         << " p " << format_number(rep.outer.p_value) << "\n"
         << "conditional chi2 (pooled): " << format_number(rep.conditional.statistic) << " dof "
         << rep.conditional.dof << " p " << format_number(rep.conditional.p_value)
         << "  worst subset p " << format_number(rep.worst_subset_p) << "\n"
         << "infeasible labels: " << rep.infeasible_labels << "  infeasible draws: " << rep.infeasible_draws << "\n"
         << "jain (measured quotas): " << format_number(rep.jain_measured_quotas);
    if (rep.rounded_available) text << "  jain (rounded quotas): " << format_number(rep.jain_rounded_quotas);
    text << "\n" << "result: " << (ok ? "PASS" : "FAIL") << " at significance " << format_number(flags.significance)
         << "\n";
    std::cout << text.str();

    if (!flags.out_dir.empty()) {
        ensure_dir(flags.out_dir);
        emit(flags.out_dir, "verify_quantum.csv", [&](std::ostream& out) {
            nlohmann::ordered_json config;
            config["caps"] = net.caps;
            config["k_req"] = k_req;
            config["K"] = K;
            config["draws"] = flags.draws;
            config["seed"] = flags.seed;
            config["significance"] = flags.significance;
            write_provenance(out, "verify-quantum", config);
            out << "labels,winner_sets,max_outer_deviation,max_conditional_deviation,outer_chi2,outer_dof,outer_p,"
                   "conditional_chi2,conditional_dof,conditional_p,worst_subset_p,infeasible_labels,"
                   "infeasible_draws,passed\n";
            out << rep.outcomes << ',' << rep.winner_sets << ',' << format_number(rep.max_outer_deviation) << ','
                << format_number(rep.max_conditional_deviation) << ',' << format_number(rep.outer.statistic) << ','
                << rep.outer.dof << ',' << format_number(rep.outer.p_value) << ','
                << format_number(rep.conditional.statistic) << ',' << rep.conditional.dof << ','
                << format_number(rep.conditional.p_value) << ',' << format_number(rep.worst_subset_p) << ','
                << rep.infeasible_labels << ',' << rep.infeasible_draws << ',' << (ok ? 1 : 0) << '\n';
        });
    }
    return ok ? kOk : kVerification;
}

struct McFlags {
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    double q = 0.05;
    int M = 3;
    std::string chi = "both";
    std::string out_dir;
    unsigned workers = 1;
};

int cmd_mc(const PointFlags& point, const McFlags& flags) {
    const NetworkConfig net = point.network();
    const Capacity k_req = point.request(net);
    ModelParams params;
    params.q = flags.q;
    params.max_attempts = flags.M;
    params.beta = point.beta;
    params.validate();
    const Request req{k_req, flags.M, point.given("k_req") ? 0.0 : point.demand};
    const ProtocolPlan plan = plan_protocol(net, req, params);

    std::vector<Accounting> modes;
    if (flags.chi != "conservative") modes.push_back(Accounting::optimistic);
    if (flags.chi != "optimistic") modes.push_back(Accounting::conservative);

    // Trial t of accounting mode a uses stream (seed, a, t).
    std::vector<std::vector<TrialOutcome>> results(modes.size(), std::vector<TrialOutcome>(flags.trials));
    for (std::size_t a = 0; a < modes.size(); ++a) {
        const std::uint64_t stream = modes[a] == Accounting::optimistic ? 0 : 1;
        parallel_for(flags.trials, flags.workers, [&](std::size_t t) {
            RandomStream rng(flags.seed, stream, t);
            results[a][t] = run_trial(plan, modes[a], rng);
        });
    }

    if (!flags.out_dir.empty()) ensure_dir(flags.out_dir);
    emit(flags.out_dir, "mc_trials.csv", [&](std::ostream& out) {
        nlohmann::ordered_json config;
        config["caps"] = net.caps;
        config["k_req"] = k_req;
        config["K"] = plan.K;
        config["ell_anc"] = plan.ell_anc;
        config["trials"] = flags.trials;
        config["seed"] = flags.seed;
        config["chi"] = flags.chi;
        config["q"] = flags.q;
        config["M"] = flags.M;
        config["beta"] = point.beta;
        write_provenance(out, "mc", config);
        out << "accounting,trial,succeeded,winners,quotas,qubits_sent,attempts_total,latency\n";
        for (std::size_t a = 0; a < modes.size(); ++a)
            for (std::size_t t = 0; t < results[a].size(); ++t) {
                const TrialOutcome& o = results[a][t];
                out << to_string(modes[a]) << ',' << t << ',' << (o.succeeded ? 1 : 0) << ','
                    << join(o.allocation.winners, ' ', 1) << ',' << join(o.allocation.quotas) << ',' << o.qubits_sent
                    << ',' << o.attempts_total << ',' << format_number(o.latency) << '\n';
            }
    });
    for (std::size_t a = 0; a < modes.size(); ++a) {
        std::uint64_t ok = 0;
        for (const auto& o : results[a]) ok += o.succeeded ? 1 : 0;
        std::cerr << "dheac: " << to_string(modes[a]) << " success " << ok << "/" << flags.trials << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DH-EAC entanglement allocation: experiment sweeps and model checks", "dheac"};
    app.footer(kFigureMap);
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    GridFlags sweep_flags, breakeven_flags, fairness_flags;
    auto* sweep = app.add_subcommand("sweep", "Analytic and Monte-Carlo metrics over the parameter grid (Figs. 1, 2)");
    sweep_flags.attach(*sweep, true, true);
    auto* breakeven = app.add_subcommand("breakeven", "THR_B2/THR_D over (m, q) at one skew and demand (Fig. 3)");
    breakeven_flags.attach(*breakeven, false, true);
    auto* fairness = app.add_subcommand("fairness", "Node-level Jain tables, heatmap data and ECDFs (Figs. 4, 5)");
    fairness_flags.attach(*fairness, false, false);
    FairnessFlags fairness_extra;
    fairness->add_option("--table-m", fairness_extra.table_m, "QLAN count for the skew/demand tables")->capture_default_str();
    fairness->add_option("--heatmap-demand", fairness_extra.heatmap_demand, "Demand for the (m, s) heatmap")->capture_default_str();
    fairness->add_option("--ecdf-m", fairness_extra.ecdf_m, "QLAN count for the ECDF files")->capture_default_str();
    fairness->add_option("--ecdf-demand", fairness_extra.ecdf_demand, "Demand for the ECDF files")->capture_default_str();

    PointFlags verify_point, mc_point;
    VerifyFlags verify_flags;
    auto* verify = app.add_subcommand("verify-quantum", "Build the embedded superposition and test its measurement statistics");
    verify_point.attach(*verify);
    verify->add_option("--draws,--trials", verify_flags.draws, "Measurement draws")->capture_default_str()->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_flags.seed, "64-bit RNG seed")->capture_default_str();
    verify->add_option("--K", verify_flags.K, "Winner count (default: Safe-Select-K)");
    verify->add_option("--significance", verify_flags.significance, "Chi-square significance level")->capture_default_str();
    verify->add_option("--out", verify_flags.out_dir, "Also write verify_quantum.csv here");
    verify->add_flag("--corrupt", verify_flags.corrupt)->group("");

    McFlags mc_flags;
    auto* mc = app.add_subcommand("mc", "Raw per-trial dump for one network and request");
    mc_point.attach(*mc);
    mc->add_option("--trials", mc_flags.trials, "Trials per accounting mode")->capture_default_str()->check(CLI::PositiveNumber);
    mc->add_option("--seed", mc_flags.seed, "64-bit RNG seed")->capture_default_str();
    mc->add_option("--q", mc_flags.q, "Per-attempt loss probability")->capture_default_str();
    mc->add_option("--M", mc_flags.M, "Transmission attempts per qubit")->capture_default_str();
    mc->add_option("--chi", mc_flags.chi, "Outer payload accounting")->capture_default_str()
        ->check(CLI::IsMember({"optimistic", "conservative", "both"}));
    mc->add_option("--out", mc_flags.out_dir, "Output directory (default: CSV to stdout)");
    mc->add_option("--workers", mc_flags.workers, "Worker threads (output does not depend on it)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(sweep_flags);
        if (breakeven->parsed()) return cmd_breakeven(breakeven_flags);
        if (fairness->parsed()) return cmd_fairness(fairness_flags, fairness_extra);
        if (verify->parsed()) return cmd_verify_quantum(verify_point, verify_flags);
        if (mc->parsed()) return cmd_mc(mc_point, mc_flags);
    } catch (const ResourceShortage& e) {
        std::cerr << "dheac: " << e.what() << "\n";
        return kShortage;
    } catch (const InvariantViolation& e) {
        std::cerr << "dheac: verification failed: " << e.what() << "\n";
        return kVerification;
    } catch (const IoError& e) {
        std::cerr << "dheac: " << e.what() << "\n";
        return kIo;
    } catch (const UsageError& e) {
        std::cerr << "dheac: " << e.what() << "\n";
        return kUsage;
    } catch (const CapacityError& e) {
        std::cerr << "dheac: " << e.what() << "\n";
        return kUsage;
    } catch (const Infeasible& e) {
        std::cerr << "dheac: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "dheac: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
