// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

#include "dheac/analytics.hpp"
#include "dheac/errors.hpp"
#include "dheac/lottery.hpp"
#include "dheac/netgen.hpp"
#include "dheac/parallel.hpp"
#include "dheac/partition.hpp"
#include "dheac/qverify.hpp"
#include "dheac/rng.hpp"
#include "dheac/sweep.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dheac;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "    violated: " << what << "\n";
        }
    }
};

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

const unsigned kWorkers = default_workers();

// ---------------------------------------------------------------------------

void safe_select_oracle(Verdict& v) {
    std::uint64_t vectors = 0, checks = 0, mismatches = 0;
    RandomStream shuffle_rng(101);
    // Capacity multisets, each presented in a shuffled order.
    std::vector<long> cur;
    std::function<void(std::size_t, long)> rec = [&](std::size_t m, long lo) {
        if (cur.size() == m) {
            const long total = std::accumulate(cur.begin(), cur.end(), 0L);
            if (total == 0) return;
            ++vectors;
            oracle::Vec shuffled = cur;
            for (std::size_t i = shuffled.size(); i > 1; --i)
                std::swap(shuffled[i - 1], shuffled[shuffle_rng.below(i)]);
            const CapacityVector caps(shuffled.begin(), shuffled.end());
            const auto min_sum = oracle::min_subset_sums(shuffled);
            for (long beta_pct : {0L, 10L})
                for (long k = 1; k <= total; ++k) {
                    ++checks;
                    const long expected = oracle::safe_k_from(min_sum, oracle::target_for(k, total, beta_pct));
                    long got = -1;
                    try {
                        got = static_cast<long>(safe_select_k(k, caps, static_cast<double>(beta_pct) / 100.0));
                    } catch (const ResourceShortage&) {
                        got = -1;
                    }
                    if (got != expected && ++mismatches <= 5)
                        v.detail << "    mismatch: k=" << k << " beta%=" << beta_pct << " got " << got
                                 << " expected " << expected << "\n";
                }
            return;
        }
        for (long c = lo; c <= 8; ++c) {
            cur.push_back(c);
            rec(m, c);
            cur.pop_back();
        }
    };
    for (std::size_t m = 1; m <= 10; ++m) rec(m, 0);
    v.detail << "    " << vectors << " capacity multisets, " << checks << " (k_req, beta) cases, " << mismatches
             << " mismatches\n";
    v.require(mismatches == 0, "safe_select_k disagrees with subset enumeration");
}

void partitions_oracle(Verdict& v) {
    std::uint64_t cases = 0, mismatches = 0;
    for (std::size_t K = 1; K <= 5; ++K) {
        oracle::Vec caps(K, 0);
        while (true) {
            // All bounded vectors of this box, bucketed by their sum.
            std::vector<std::set<oracle::Vec>> by_sum(13);
            oracle::Vec x(K, 0);
            while (true) {
                const long s = std::accumulate(x.begin(), x.end(), 0L);
                if (s <= 12) by_sum[static_cast<std::size_t>(s)].insert(x);
                std::size_t i = 0;
                while (i < K && x[i] == caps[i]) x[i++] = 0;
                if (i == K) break;
                ++x[i];
            }
            const CapacityVector c(caps.begin(), caps.end());
            for (long k = 0; k <= 12; ++k) {
                ++cases;
                const PartitionSet got = enum_partitions(k, c);
                std::set<oracle::Vec> got_set;
                for (const auto& vec : got.vectors) got_set.insert(oracle::Vec(vec.begin(), vec.end()));
                const bool sorted = std::is_sorted(got.vectors.begin(), got.vectors.end());
                if ((got_set != by_sum[static_cast<std::size_t>(k)] || got_set.size() != got.size() || !sorted) &&
                    ++mismatches <= 5)
                    v.detail << "    mismatch at K=" << K << " k=" << k << "\n";
            }
            std::size_t i = 0;
            while (i < K && caps[i] == 6) caps[i++] = 0;
            if (i == K) break;
            ++caps[i];
        }
    }
    v.detail << "    " << cases << " (k, caps) cases, " << mismatches << " mismatches\n";
    v.require(mismatches == 0, "enum_partitions differs from brute-force set");
}

void closed_forms(Verdict& v) {
    // Hand-derived values; the reference powers use long double products.
    const auto same6 = [](double got, long double want) {
        return std::abs(static_cast<long double>(got) - want) <= 5e-7L * std::abs(want);
    };
    const auto power = [](long double base, int e) {
        long double r = 1.0L;
        for (int i = 0; i < e; ++i) r *= base;
        return r;
    };
    ModelParams p;
    p.q = 0.05;
    p.max_attempts = 3;
    const long double unit = 1.0L - 0.05L * 0.05L * 0.05L;
    const SuccessBounds b = success_bounds(16, 4, 16, 64, p);
    const double b2 = success_b2(16, p);
    v.detail << "    P_upper=" << fmt(b.upper, 7) << " P_lower=" << fmt(b.lower, 7) << " P_b2=" << fmt(b2, 7) << "\n";
    v.require(same6(p.unit_success(), unit), "p = 0.999875");
    v.require(same6(b.upper, power(unit, 20)), "P_upper = p^20");
    v.require(same6(b.lower, power(unit, 96)), "P_lower = p^96");
    v.require(same6(b2, power(unit, 16)), "P_b2 = p^16");
    v.require(fmt(b.upper, 5) == "0.9975" && fmt(b.lower, 5) == "0.98807" && fmt(b2, 5) == "0.998",
              "stated 5-digit values 0.99750 / 0.98807 / 0.99800");

    ModelParams lossless;
    lossless.q = 0.0;
    const double l_d = latency_dheac(4, 2, 4, 0, lossless, Accounting::optimistic);
    const double l_b2 = latency_b2(4, 2, lossless);
    v.detail << "    L_D=" << fmt(l_d) << " L_B2=" << fmt(l_b2) << " (q=0, m=4, K=2, k_req=4)\n";
    v.require(same6(l_d, 6.30L), "L_D = 6.30");
    v.require(same6(l_b2, 5.10L), "L_B2 = 5.10");
    const SuccessBounds one = success_bounds(16, 4, 16, 64, lossless);
    v.require(one.upper == 1.0 && one.lower == 1.0 && success_b2(16, lossless) == 1.0, "q=0 gives probability 1");
}

// Canonical-grid index -> coordinates, independent of enumerate_grid.
GridPoint grid_point(std::size_t idx) {
    static const std::size_t ms[] = {4, 8, 16, 32};
    static const double qs[] = {0.01, 0.05, 0.10, 0.15};
    static const double ds[] = {0.10, 0.20, 0.40, 0.60};
    static const double ss[] = {0.0, 0.5, 1.0, 1.5, 2.0};
    return {idx, ms[idx / 80], qs[(idx / 20) % 4], ds[(idx / 5) % 4], ss[idx % 5]};
}

void mc_sandwich(Verdict& v) {
    constexpr std::uint64_t trials = 100'000;
    RandomStream pick(2024);
    std::set<std::size_t> chosen;
    std::size_t checked = 0;
    while (chosen.size() < 20) {
        const GridPoint pt = grid_point(pick.below(320));
        if (!chosen.insert(pt.index).second) continue;
        const Capacity total = 10 * static_cast<Capacity>(pt.m);
        const NetworkConfig net = generate_network(pt.m, pt.skew, total);
        ModelParams params;
        params.q = pt.q;
        const Request req{demand_to_kreq(pt.demand, total), params.max_attempts, pt.demand};
        const ProtocolPlan plan = plan_protocol(net, req, params);
        const SuccessBounds b = success_bounds(req.k_req, plan.K, pt.m, plan.ell_anc, params);
        for (Accounting mode : {Accounting::optimistic, Accounting::conservative}) {
            const McOptions options{7, pt.index * 2 + (mode == Accounting::optimistic ? 0u : 1u), kWorkers};
            const SuccessEstimate est = estimate_success(plan, mode, trials, options);
            const double lo = b.lower - 3 * binomial_sigma(b.lower, trials);
            const double hi = b.upper + 3 * binomial_sigma(b.upper, trials);
            const bool ok = est.rate >= lo && est.rate <= hi;
            ++checked;
            if (!ok)
                v.detail << "    outside: point " << pt.index << " " << to_string(mode) << " rate " << fmt(est.rate, 8)
                         << " band [" << fmt(lo, 8) << ", " << fmt(hi, 8) << "]\n";
            v.require(ok, "MC success inside [P_lower - 3 sigma, P_upper + 3 sigma]");
        }
    }
    v.detail << "    " << chosen.size() << " grid points x 2 accountings = " << checked << " estimates at " << trials
             << " trials\n";
}

void fairness_numbers(Verdict& v) {
    constexpr std::uint64_t trials = 100'000;
    const Capacity total = 160;
    const auto run = [&](double skew, double demand, std::uint64_t stream) {
        const NetworkConfig net = generate_network(16, skew, total);
        const Request req{demand_to_kreq(demand, total), 3, demand};
        const FairnessReport rep = estimate_fairness(net, req, 0.10, trials, McOptions{11, stream, kWorkers});
        return std::pair(rep.jain, jain_index(exact_node_probs(net, req, 0.10)));
    };
    std::uint64_t stream = 0;
    for (double demand : {0.40, 0.60})
        for (double skew : {0.0, 0.5, 1.0, 1.5, 2.0}) {
            const auto [jain, exact] = run(skew, demand, stream++);
            const bool ok = jain >= 0.99;
            v.detail << "    (a) demand " << fmt(demand) << " s " << fmt(skew) << ": jain " << fmt(jain, 5)
                     << " (exact_node_probs oracle " << fmt(exact, 5) << ")" << (ok ? "" : "  < 0.99") << "\n";
            v.require(ok, "(a) jain >= 0.99 at demand " + fmt(demand) + ", s " + fmt(skew));
        }
    const auto [jain, exact] = run(2.0, 0.10, stream++);
    const bool ok = jain >= 0.92 && jain <= 0.96;
    v.detail << "    (b) demand 0.1 s 2: jain " << fmt(jain, 5) << " (exact_node_probs oracle " << fmt(exact, 5) << ")"
             << (ok ? "" : "  outside [0.92, 0.96]") << "\n";
    v.require(ok, "(b) jain in [0.92, 0.96]");
}

void fairness_agreement(Verdict& v) {
    constexpr std::uint64_t trials = 100'000;
    // Two-sided tail of a 3 sigma normal deviation.
    const double tail = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), 3.0));
    std::size_t networks = 0, nodes = 0, beyond3 = 0;
    double max_z = 0.0;
    std::uint64_t stream = 0;
    for (std::size_t m : {4u, 8u})
        for (double demand : {0.10, 0.20, 0.40, 0.60})
            for (double skew : {0.0, 0.5, 1.0, 1.5, 2.0}) {
                const Capacity total = 10 * static_cast<Capacity>(m);
                const NetworkConfig net = generate_network(m, skew, total);
                const Request req{demand_to_kreq(demand, total), 3, demand};
                const auto exact = exact_node_probs(net, req, 0.10);
                const FairnessReport rep = estimate_fairness(net, req, 0.10, trials, McOptions{13, stream++, kWorkers});
                ++networks;
                for (std::size_t i = 0; i < exact.size(); ++i) {
                    ++nodes;
                    const double sigma = binomial_sigma(exact[i], trials);
                    const double diff = std::abs(rep.node_probs[i] - exact[i]);
                    if (sigma == 0.0) {
                        if (diff > 1e-12) {
                            beyond3 += 1;
                            max_z = std::numeric_limits<double>::infinity();
                        }
                        continue;
                    }
                    const double z = diff / sigma;
                    max_z = std::max(max_z, z);
                    if (z > 3.0) ++beyond3;
                }
            }
    // Node-level 3 sigma tests are many; allow what chance alone produces
    // (99.9% quantile) and require no gross outlier.
    const boost::math::binomial chance(static_cast<double>(nodes), tail);
    const double allowed = std::ceil(boost::math::quantile(boost::math::complement(chance, 0.001)));
    v.detail << "    " << networks << " networks, " << nodes << " nodes at " << trials << " trials: " << beyond3
             << " nodes beyond 3 sigma (expected by chance " << fmt(tail * static_cast<double>(nodes), 3)
             << ", allowed " << allowed << "), max |z| " << fmt(max_z, 4) << "\n";
    v.require(static_cast<double>(beyond3) <= allowed, "3 sigma exceedances consistent with chance");
    v.require(max_z < 5.0, "no node beyond 5 sigma");
}

void latency_direction(Verdict& v) {
    SweepSpec spec;
    spec.q_values = {0.05};
    spec.skew_values = {1.0};
    spec.demand_values = {0.40, 0.60};
    spec.workers = kWorkers;
    const auto rows = run_sweep(spec);
    for (double demand : spec.demand_values)
        for (Accounting mode : {Accounting::optimistic, Accounting::conservative}) {
            std::vector<double> ratio;
            for (const ResultRow& r : rows) {
                if (r.point.demand != demand) continue;
                v.require(r.feasible, "grid point feasible");
                const auto& mr = r.metrics;
                ratio.push_back((mode == Accounting::optimistic ? mr.L_d_optimistic : mr.L_d_conservative) / mr.L_b2);
            }
            v.detail << "    demand " << fmt(demand) << " " << to_string(mode) << ": L_D/L_B2 over m=4,8,16,32 =";
            for (double x : ratio) v.detail << " " << fmt(x, 4);
            v.detail << "\n";
            v.require(ratio.size() == 4, "four m values");
            for (std::size_t i = 1; i < ratio.size(); ++i)
                v.require(ratio[i] < ratio[i - 1], "strictly decreasing in m");
            if (mode == Accounting::optimistic) v.require(ratio.back() < 1.0, "optimistic ratio < 1 at m=32");
        }
}

void breakeven_direction(Verdict& v) {
    SweepSpec spec;
    spec.skew_values = {1.0};
    spec.demand_values = {0.40};
    spec.workers = kWorkers;
    const auto cells = run_breakeven(spec);
    const auto find = [&](std::size_t m, double q) -> const BreakevenCell& {
        for (const auto& c : cells)
            if (c.m == m && c.q == q) return c;
        throw std::logic_error("cell missing");
    };
    const BreakevenCell& small = find(4, 0.01);
    const BreakevenCell& large = find(32, 0.15);
    v.require(small.feasible && large.feasible, "cells feasible");
    v.require(cells.size() == 16, "4 x 4 matrix");
    v.detail << "    optimistic: " << fmt(large.ratio_optimistic, 4) << " at (32, 0.15) vs "
             << fmt(small.ratio_optimistic, 4) << " at (4, 0.01); conservative: " << fmt(large.ratio_conservative, 4)
             << " vs " << fmt(small.ratio_conservative, 4) << "\n";
    v.require(large.ratio_optimistic < small.ratio_optimistic, "optimistic ratio smaller at (32, 0.15)");
    v.require(large.ratio_conservative < small.ratio_conservative, "conservative ratio smaller at (32, 0.15)");
}

void quantum_verification(Verdict& v) {
    struct Case {
        std::string name;
        NetworkConfig net;
        Capacity k_req;
    };
    const std::vector<Case> cases = {{"caps (3,3,3,3), k_req 4", network_from_caps({3, 3, 3, 3}), 4},
                                     {"m 6, s 1, total 30, demand 0.4", generate_network(6, 1.0, 30),
                                      demand_to_kreq(0.4, 30)}};
    for (const Case& c : cases) {
        const std::size_t K = safe_select_k(c.k_req, c.net.caps, 0.10);
        const SparseState state = build_embedded(c.net, c.k_req, K);
        // Analytic outer marginal against 1/C(m,K), computed here directly.
        const auto outer = marginal_outer(state);
        const double subsets = static_cast<double>(binomial_capped(c.net.m(), K, UINT64_MAX - 1));
        double dev = 0.0;
        for (const auto& [winners, prob] : outer) dev = std::max(dev, std::abs(prob - 1.0 / subsets));
        const VerificationReport rep = verify_embedded(state, c.net, c.k_req, 100'000, 5);
        v.detail << "    " << c.name << ": K " << K << ", " << rep.outcomes << " labels, outer dev " << fmt(dev, 3)
                 << ", outer chi2 p " << fmt(rep.outer.p_value, 4) << ", conditional chi2 p "
                 << fmt(rep.conditional.p_value, 4) << ", infeasible " << rep.infeasible_labels << "/"
                 << rep.infeasible_draws << "\n";
        v.require(static_cast<double>(outer.size()) == subsets, "every winner set present");
        v.require(dev <= 1e-12, "outer marginal uniform to 1e-12");
        v.require(rep.max_outer_deviation <= 1e-12, "reported outer deviation <= 1e-12");
        v.require(rep.outer.p_value >= 0.01, "outer chi2 passes at 0.01");
        v.require(rep.conditional.p_value >= 0.01, "conditional chi2 passes at 0.01");
        v.require(rep.infeasible_labels == 0 && rep.infeasible_draws == 0, "zero feasibility violations");
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Verdict& v) {
    const fs::path dir = fs::temp_directory_path() / ("dheac_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto run = [&](const std::string& tag, unsigned workers) {
        const fs::path out = dir / tag;
        const std::string cmd = std::string("\"") + DHEAC_CLI + "\" sweep --mode both --trials 2000 --seed 99 --workers " +
                                std::to_string(workers) + " --out \"" + out.string() + "\"";
        const int rc = std::system(cmd.c_str());
        v.require(rc == 0, "sweep exits 0 (" + tag + ")");
        return slurp(out / "sweep.csv");
    };
    const std::string a = run("w1", 1);
    const std::string b = run("w8", 8);
    const std::string c = run("w1_again", 1);
    std::size_t lines = static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n'));
    v.detail << "    canonical grid, analytic + MC at 2000 trials: " << a.size() << " bytes, " << lines << " lines\n";
    v.require(!a.empty(), "non-empty output");
    v.require(a == b, "workers 1 and 8 byte-identical");
    v.require(a == c, "repeat run byte-identical");
    fs::remove_all(dir);
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        void (*run)(Verdict&);
    };
    const Criterion criteria[] = {
        {1, "safe_select_k equals subset enumeration", safe_select_oracle},
        {2, "enum_partitions equals brute-force generator", partitions_oracle},
        {3, "closed-form success and latency values", closed_forms},
        {4, "Monte-Carlo success inside analytic bounds", mc_sandwich},
        {5, "fairness at m=16, total 160", fairness_numbers},
        {6, "Monte-Carlo vs exact node probabilities", fairness_agreement},
        {7, "latency ratio decreases with m", latency_direction},
        {8, "break-even ratio direction", breakeven_direction},
        {9, "embedded-state verification", quantum_verification},
        {10, "sweep CSV byte-determinism across workers", determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(v);
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << "    exception: " << e.what() << "\n";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << "  (" << fmt(secs, 3) << " s)\n"
                  << v.detail.str() << std::flush;
        failed += v.pass ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
