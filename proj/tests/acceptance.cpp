// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run via `ctest -R acceptance` or directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "eidarp/charging.hpp"
#include "eidarp/exact.hpp"
#include "eidarp/feasibility.hpp"
#include "eidarp/generator.hpp"
#include "eidarp/io.hpp"
#include "eidarp/search.hpp"
#include "eidarp/stp.hpp"
#include "eidarp/verify.hpp"
#include "test_support.hpp"

using namespace eidarp;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, double seconds) {
    std::printf("%s  criterion %d: %s  (%.1f s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- criterion 1: timetable expansion reproduction -------------------------
void criterion1() {
    const auto t0 = Clock::now();
    const Instance inst = test::two_line_timetable_instance();
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    bool ok = graph.nodes.size() == 20;
    bool kept = false, pruned = true;
    for (const auto& t : graph.transfer_arcs) {
        if (t.from == 2 && t.to == 6 && std::abs(t.wait - 3.0) < 1e-9) kept = true;
        if (t.from == 2 && t.to == 14) pruned = false;
    }
    ok = ok && kept && pruned && graph.transfer_arcs.size() == 2;
    const double secs = elapsed(t0);
    ok = ok && secs < 1.0;
    report(1, ok, "20 transit nodes; 3-min transfer 2->6 kept, 14-min transfer 2->14 pruned", secs);
}

// ---- criterion 2: exact-oracle equivalence on tiny instances ---------------
void criterion2() {
    const auto t0 = Clock::now();
    bool ok = true;
    double worst_gap = 0.0;
    for (int seed = 1; seed <= 30; ++seed) {
        const int n = 2 + (seed % 3);            // 2..4 customers
        const double soc = seed > 20 ? 0.4 : 1.0;  // last third exercises charging
        const GeneratorConfig cfg = test::tiny_config(n, soc);
        const Instance inst = generate(cfg, static_cast<std::uint64_t>(seed));
        const ExpandedTransitGraph graph = build_transit_graph(inst);
        const ExactResult exact = brute_force_solve(inst, graph);
        SearchConfig sc = SearchConfig::from_params(inst.params, static_cast<std::uint64_t>(seed));
        const SearchResult lns = run_multi(inst, graph, sc, 5, 1);
        const double gap =
            std::abs(lns.best.objective_cache - exact.best.objective_cache);
        worst_gap = std::max(worst_gap, gap);
        if (gap > 0.2) {
            std::printf("  seed %d: lns %.4f vs exact %.4f\n", seed, lns.best.objective_cache,
                        exact.best.objective_cache);
            ok = false;
        }
        if (!verify(inst, graph, exact.best).ok()) {
            std::printf("  seed %d: exact solution failed verification\n", seed);
            ok = false;
        }
    }
    const double secs = elapsed(t0);
    ok = ok && secs < 300.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "30 tiny instances: LNS best-of-5 equals brute force (worst gap %.3f)",
                  worst_gap);
    report(2, ok, buf, secs);
}

// ---- criterion 3: feasibility soundness over fuzzed routes -----------------
void criterion3() {
    const auto t0 = Clock::now();
    Rng rng(2024);
    int fuzzed = 0, engine_ok = 0, oracle_ok = 0, unsound = 0, false_infeasible = 0;
    int coupled = 0;
    while (fuzzed < 1000) {
        GeneratorConfig cfg;
        cfg.n = 6;
        cfg.fleet = 2;
        const Instance inst = generate(cfg, 3000 + static_cast<std::uint64_t>(fuzzed % 80));
        const ExpandedTransitGraph graph = build_transit_graph(inst);
        Solution sol = make_empty_solution(inst);
        Route r0;
        if (!test::fuzz_route(inst, graph, sol, 0, rng, r0)) continue;
        ++fuzzed;
        std::vector<Route> routes{r0};
        // every third case adds a second coupled route sharing customers' TPs
        Route r1;
        if (fuzzed % 3 == 0 && test::fuzz_route(inst, graph, sol, 1, rng, r1)) {
            routes.push_back(r1);
            ++coupled;
        }

        bool engine_feasible = true;
        Solution committed = sol;
        std::map<int, Route> delayed;
        for (auto& rt : routes) {
            Route eval = rt;
            EvalContext ctx(inst, graph, committed);
            if (!nine_step_evaluate(eval, ctx, &delayed).feasible) {
                engine_feasible = false;
                break;
            }
            committed.routes[static_cast<std::size_t>(eval.bus)] = eval;
            for (const auto& [b2, rt2] : delayed)
                committed.routes[static_cast<std::size_t>(b2)] = rt2;
            delayed.clear();
        }
        const bool oracle_feasible =
            schedule_exists(inst, graph, routes, test::journeys_of(sol));
        if (engine_feasible) {
            ++engine_ok;
            for (const auto& rt : routes) refresh_route_journeys(inst, graph, committed, rt.bus);
            committed.objective_cache = compute_objective(inst, graph, committed);
            const VerifyReport rep = verify(inst, graph, committed);
            if (!rep.ok() || !oracle_feasible) {
                ++unsound;
                if (unsound <= 3)
                    std::printf("  unsound case at fuzz %d:\n%s", fuzzed, rep.to_string().c_str());
            }
        } else if (oracle_feasible) {
            ++false_infeasible;
        }
        if (oracle_feasible) ++oracle_ok;
    }
    const double rate = oracle_ok > 0 ? static_cast<double>(false_infeasible) / oracle_ok : 0.0;
    const bool ok = unsound == 0 && rate < 0.10 && engine_ok > 100;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "1000 fuzzed routes (%d coupled): 0 unsound required (got %d), "
                  "false-infeasible rate %.1f%% < 10%%",
                  coupled, unsound, 100.0 * rate);
    report(3, ok, buf, elapsed(t0));
}

// ---- criterion 4: charging invariants under contention ---------------------
void criterion4() {
    const auto t0 = Clock::now();
    Rng rng(777);
    int cases = 0, overlap_violations = 0, soc_violations = 0, rollback_violations = 0;
    while (cases < 500) {
        GeneratorConfig cfg;
        cfg.n = 6;
        cfg.fleet = 3;
        cfg.n_depots = 1;  // one charger, maximal contention
        cfg.init_soc_fraction = 0.10 + 0.04 * (cases % 5);
        const Instance inst = generate(cfg, 5000 + static_cast<std::uint64_t>(cases % 100));
        const ExpandedTransitGraph graph = build_transit_graph(inst);
        Solution sol = make_empty_solution(inst);
        std::vector<Route> routes;
        for (int bus = 0; bus < 3; ++bus) {
            Route r;
            if (!test::fuzz_route(inst, graph, sol, bus, rng, r)) continue;
            EvalContext ctx(inst, graph, sol);
            Route eval = r;
            if (!nine_step_evaluate(eval, ctx).feasible) continue;
            routes.push_back(eval);
        }
        if (routes.empty()) continue;
        ++cases;
        std::vector<ChargerCalendar> cals(inst.chargers.size());
        for (auto& rt : routes) {
            EvalContext ctx(inst, graph, sol);
            Route before = rt;
            const std::vector<ChargerCalendar> cals_before = cals;
            const ChargingOutcome oc = schedule_recharges(rt, ctx, cals);
            if (!oc.success) {
                // rollback: byte-identical route and calendars
                bool same = rt.stops.size() == before.stops.size();
                for (std::size_t c = 0; same && c < cals.size(); ++c)
                    same = cals[c].reserved.size() == cals_before[c].reserved.size();
                if (!same) ++rollback_violations;
                continue;
            }
            const EnergyPass ep = energy_pass(inst, graph, rt);
            const Bus& bus = inst.buses[static_cast<std::size_t>(rt.bus)];
            for (double soc : ep.soc)
                if (soc < bus.e_min - 1e-6 || soc > bus.e_max + 1e-6) ++soc_violations;
        }
        for (const auto& c : cals)
            for (std::size_t i = 1; i < c.reserved.size(); ++i)
                if (c.reserved[i].start < c.reserved[i - 1].end - kEpsTime) ++overlap_violations;
    }
    const bool ok =
        overlap_violations == 0 && soc_violations == 0 && rollback_violations == 0;
    const double secs = elapsed(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "500 contended charging cases: overlaps %d, SoC violations %d, rollback "
                  "violations %d (all must be 0)",
                  overlap_violations, soc_violations, rollback_violations);
    report(4, ok && secs < 120.0, buf, secs);
}

// ---- criterion 5: monotone best trace + byte-identical determinism ---------
void criterion5() {
    const auto t0 = Clock::now();
    GeneratorConfig cfg;
    cfg.n = 15;
    const Instance inst = generate(cfg, 904);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    bool ok = true;
    for (std::uint64_t seed : {1ULL, 9ULL, 42ULL}) {
        SearchConfig sc = SearchConfig::from_params(inst.params, seed);
        sc.n_iter = 120;
        const SearchResult a = run_search(inst, graph, sc);
        const SearchResult b = run_search(inst, graph, sc);
        for (std::size_t i = 1; i < a.best_trace.size(); ++i)
            if (a.best_trace[i] > a.best_trace[i - 1] + 1e-12) ok = false;
        if (solution_to_json_text(inst, graph, a.best) !=
            solution_to_json_text(inst, graph, b.best))
            ok = false;
    }
    report(5, ok, "best trace non-increasing; same seed gives byte-identical solution files",
           elapsed(t0));
}

// ---- criterion 6: 50-customer scale smoke test ------------------------------
void criterion6() {
    const auto t0 = Clock::now();
    GeneratorConfig cfg;
    cfg.n = 50;
    const Instance inst = generate(cfg, 42);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    SearchConfig sc = SearchConfig::from_params(inst.params, 1);  // n_iter = 600 default
    const SearchResult res = run_search(inst, graph, sc);
    const double secs = elapsed(t0);
    const double init = res.best_trace.front();
    const double best = res.best.objective_cache;
    const double improvement = (init - best) / init;
    const VerifyReport rep = verify(inst, graph, res.best);
    const bool ok = secs < 900.0 && rep.ok() && improvement >= 0.15;
    if (!rep.ok()) std::printf("%s", rep.to_string().c_str());
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "n=50, 600 iterations in %.0f s (< 900); verifier clean; improvement %.1f%% "
                  ">= 15%%",
                  secs, 100.0 * improvement);
    report(6, ok, buf, secs);
}

// ---- criterion 7: phi sweep directional check -------------------------------
void criterion7() {
    const auto t0 = Clock::now();
    GeneratorConfig cfg;
    cfg.n = 100;
    auto solve_at = [&](double phi) {
        const GeneratorConfig c = apply_axis(cfg, "phi", phi);
        const Instance inst = generate(c, 11);
        const ExpandedTransitGraph graph = build_transit_graph(inst);
        SearchConfig sc = SearchConfig::from_params(inst.params, 11);
        const SearchResult res = run_search(inst, graph, sc);
        return compute_kpis(inst, graph, res.best);
    };
    const KpiReport lo = solve_at(1.3);
    const KpiReport hi = solve_at(2.5);
    const bool ok = hi.btt < lo.btt && hi.ctt > lo.ctt;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "phi sweep on n=100: BTT %.0f -> %.0f (must fall), CTT %.1f -> %.1f (must rise)",
                  lo.btt, hi.btt, lo.ctt, hi.ctt);
    report(7, ok, buf, elapsed(t0));
}

// ---- criterion 8: objective accounting --------------------------------------
void criterion8() {
    const auto t0 = Clock::now();
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        GeneratorConfig cfg;
        cfg.n = 12;
        const Instance inst = generate(cfg, 600 + seed);
        const ExpandedTransitGraph graph = build_transit_graph(inst);
        SearchConfig sc = SearchConfig::from_params(inst.params, seed);
        sc.n_iter = 80;
        const SearchResult res = run_search(inst, graph, sc);
        const VerifyReport rep = verify(inst, graph, res.best);
        if (std::abs(rep.recomputed_objective - res.best.objective_cache) > 1e-9) ok = false;
        // the all-reject solution costs exactly omega * n
        Solution empty = make_empty_solution(inst);
        empty.objective_cache = compute_objective(inst, graph, empty);
        if (empty.objective_cache != inst.params.omega * inst.n()) ok = false;
        if (std::abs(verify(inst, graph, empty).recomputed_objective -
                     inst.params.omega * inst.n()) != 0.0)
            ok = false;
    }
    report(8, ok, "cached objective equals verifier recomputation within 1e-9; all-reject = omega*n",
           elapsed(t0));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
