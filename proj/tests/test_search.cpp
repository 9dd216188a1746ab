#include <doctest.h>

#include "eidarp/io.hpp"
#include "eidarp/search.hpp"
#include "eidarp/verify.hpp"
#include "test_support.hpp"

using namespace eidarp;

TEST_CASE("initial construction without transit is a pure DARP solution") {
    GeneratorConfig cfg;
    cfg.n = 10;
    cfg.layout = "none";
    const Instance inst = generate(cfg, 61);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    const Solution sol = construct_initial(inst, graph);
    for (const auto& j : sol.journeys)
        if (j.served()) CHECK(j.option == 5);
    const VerifyReport rep = verify(inst, graph, sol);
    INFO(rep.to_string());
    CHECK(rep.ok());
}

TEST_CASE("aligned stations and windows produce a zero-bus option-1 journey") {
    Instance inst = test::two_line_timetable_instance();
    Request r;
    r.id = 0;
    r.origin = {0.0, 8.0};        // station A
    r.destination = {10.0, 8.0};  // station C
    r.origin_given = true;
    r.origin_tw = TimeWindow{5.0, 20.0};  // run 1 departs A at 15
    inst.requests = {r};
    inst.finalize();
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    const Solution sol = construct_initial(inst, graph);
    REQUIRE(sol.journeys[0].served());
    CHECK(sol.journeys[0].option == 1);
    CHECK(sol.journeys[0].walk_time == doctest::Approx(0.0));
    double bus_time = 0.0;
    for (const auto& rt : sol.routes) bus_time += route_travel_time(inst, graph, rt);
    CHECK(bus_time == doctest::Approx(0.0));
    CHECK(sol.objective_cache == doctest::Approx(17.0));  // theta_C - theta_A = 32 - 15
}

TEST_CASE("construction serves everyone under an unlimited fleet") {
    GeneratorConfig cfg;
    cfg.n = 30;
    const Instance inst = generate(cfg, 62);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    const Solution sol = construct_initial(inst, graph);
    CHECK(sol.n_rejected() == 0);
}

TEST_CASE("relatedness is symmetric and guarded") {
    GeneratorConfig cfg;
    cfg.n = 8;
    const Instance inst = generate(cfg, 63);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    const Solution sol = construct_initial(inst, graph);
    Rng rng(1);
    for (int t = 0; t < 30; ++t) {
        const int a = rng.uniform_int(0, inst.n() - 1);
        const int b = rng.uniform_int(0, inst.n() - 1);
        if (a == b) continue;
        CHECK(relatedness(inst, graph, sol, a, b) ==
              doctest::Approx(relatedness(inst, graph, sol, b, a)));
    }

    // identical OD and schedule, no shared TPs anywhere: capped value
    Instance twin;
    twin.params = inst.params;
    Request r0;
    r0.id = 0;
    r0.origin = {2.0, 2.0};
    r0.destination = {5.0, 5.0};
    r0.origin_given = true;
    r0.origin_tw = TimeWindow{10.0, 25.0};
    Request r1 = r0;
    r1.id = 1;
    twin.requests = {r0, r1};
    twin.depots = {{0.0, 0.0}};
    Bus b0 = inst.buses[0];
    b0.id = 0;
    b0.origin_depot = 0;
    b0.dest_depot = 0;
    twin.buses = {b0};
    twin.finalize();
    const ExpandedTransitGraph g2 = build_transit_graph(twin);
    Solution s2 = make_empty_solution(twin);
    for (int i = 0; i < 2; ++i) {
        s2.journeys[static_cast<std::size_t>(i)].option = 5;
        s2.journeys[static_cast<std::size_t>(i)].dep = 12.0;
        s2.journeys[static_cast<std::size_t>(i)].arr = 30.0;
    }
    CHECK(relatedness(twin, g2, s2, 0, 1) == doctest::Approx(1e9));
}

TEST_CASE("worst removal removes the customer whose deletion helps most") {
    GeneratorConfig cfg;
    cfg.n = 8;
    const Instance inst = generate(cfg, 64);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    Solution sol = construct_initial(inst, graph);
    // oracle: delete-and-recompute over all served customers
    double best_gain = -1e18;
    int best_r = -1;
    for (int r : sol.served()) {
        Solution tmp = sol;
        std::vector<int> extra;
        remove_customer(inst, graph, tmp, r, extra);
        const double gain = sol.objective_cache - tmp.objective_cache;
        if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_r = r;
        }
    }
    Rng rng(2);
    Solution work = sol;
    const std::vector<int> removed = destroy(inst, graph, work, "d_worst", 1, rng);
    REQUIRE(removed.size() >= 1);
    CHECK(removed.front() == best_r);
}

TEST_CASE("route removal takes out integrated customers entirely") {
    GeneratorConfig cfg;
    cfg.n = 12;
    const Instance inst = generate(cfg, 65);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    Solution sol = construct_initial(inst, graph);
    Rng rng(3);
    Solution work = sol;
    const std::vector<int> removed = destroy(inst, graph, work, "d_route", 3, rng);
    for (int r : removed) {
        CHECK_FALSE(work.journeys[static_cast<std::size_t>(r)].served());
        for (const auto& rt : work.routes)
            for (const auto& s : rt.stops) {
                const bool still_there = s.is_customer() && s.ref == r;
                CHECK_FALSE(still_there);
            }
    }
    const VerifyReport rep = verify(inst, graph, work);
    INFO(rep.to_string());
    CHECK(rep.ok());
}

TEST_CASE("repair with an empty unserved set is a no-op") {
    GeneratorConfig cfg;
    cfg.n = 5;
    const Instance inst = generate(cfg, 66);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    Solution sol = construct_initial(inst, graph);
    const std::string before = solution_to_json_text(inst, graph, sol);
    Rng rng(4);
    repair(inst, graph, sol, "r_greedy", {}, rng);
    CHECK(solution_to_json_text(inst, graph, sol) == before);
}

TEST_CASE("single customer on a single empty route: the plan matches position enumeration") {
    GeneratorConfig cfg;
    cfg.n = 1;
    cfg.fleet = 1;
    cfg.layout = "none";
    const Instance inst = generate(cfg, 67);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    Solution sol = make_empty_solution(inst);
    sol.objective_cache = compute_objective(inst, graph, sol);
    InsertionQuery q;
    q.request = 0;
    const InsertionResult res = find_best_insertion(inst, graph, sol, q);
    REQUIRE(res.best.feasible);
    // only one structural position exists on an empty route; the plan cost
    // must equal the objective delta after applying it
    Solution applied = sol;
    apply_insertion(inst, graph, applied, res.best);
    CHECK(applied.objective_cache - sol.objective_cache ==
          doctest::Approx(res.best.delta_cost).epsilon(1e-9));
}

TEST_CASE("regret-2 picks the customer with the larger best-to-second gap") {
    GeneratorConfig cfg;
    cfg.n = 6;
    const Instance inst = generate(cfg, 68);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    Solution sol = construct_initial(inst, graph);
    Rng rng(5);
    Solution work = sol;
    std::vector<int> removed = destroy(inst, graph, work, "d_random", 2, rng);
    REQUIRE(removed.size() == 2);
    // oracle regrets
    double regret[2];
    for (int i = 0; i < 2; ++i) {
        InsertionQuery q;
        q.request = removed[static_cast<std::size_t>(i)];
        q.k_costs = 2;
        const InsertionResult res = find_best_insertion(inst, graph, work, q);
        REQUIRE(res.best.feasible);
        regret[i] = res.costs.size() >= 2 ? res.costs[1] - res.costs[0] : 1e6;
    }
    const int expect_first = regret[0] >= regret[1] ? removed[0] : removed[1];
    // r_regret with a fixed k=2 (uniform_int(2,3) with this seed): emulate by
    // inserting manually in regret order
    Rng rng2(6);
    const int k = rng2.uniform_int(2, 3);
    (void)k;
    repair(inst, graph, work, "r_regret", removed, rng2);
    CHECK(work.journeys[static_cast<std::size_t>(expect_first)].served());
}

TEST_CASE("local search only improves the objective") {
    GeneratorConfig cfg;
    cfg.n = 12;
    const Instance inst = generate(cfg, 69);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    Solution sol = construct_initial(inst, graph);
    const double before = sol.objective_cache;
    local_search(inst, graph, sol, {});
    CHECK(sol.objective_cache <= before + 1e-9);
    const VerifyReport rep = verify(inst, graph, sol);
    INFO(rep.to_string());
    CHECK(rep.ok());
}

TEST_CASE("same seed twice gives byte-identical solution files") {
    GeneratorConfig cfg;
    cfg.n = 10;
    const Instance inst = generate(cfg, 70);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    SearchConfig sc = SearchConfig::from_params(inst.params, 17);
    sc.n_iter = 60;
    const SearchResult a = run_search(inst, graph, sc);
    const SearchResult b = run_search(inst, graph, sc);
    CHECK(a.best.objective_cache == b.best.objective_cache);
    CHECK(solution_to_json_text(inst, graph, a.best) == solution_to_json_text(inst, graph, b.best));
}

TEST_CASE("best objective trace is non-increasing; pure descent with t_max 0") {
    GeneratorConfig cfg;
    cfg.n = 10;
    const Instance inst = generate(cfg, 71);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    SearchConfig sc = SearchConfig::from_params(inst.params, 5);
    sc.n_iter = 80;
    SUBCASE("default annealing") {}
    SUBCASE("t_max_factor zero") { sc.t_max_factor = 0.0; }
    const SearchResult res = run_search(inst, graph, sc);
    for (std::size_t i = 1; i < res.best_trace.size(); ++i)
        CHECK(res.best_trace[i] <= res.best_trace[i - 1] + 1e-9);
    const VerifyReport rep = verify(inst, graph, res.best);
    INFO(rep.to_string());
    CHECK(rep.ok());
    CHECK(res.best.objective_cache <= inst.params.omega * inst.n() + 1e-9);
}

TEST_CASE("every incumbent the driver keeps is verifier-feasible") {
    GeneratorConfig cfg;
    cfg.n = 8;
    const Instance inst = generate(cfg, 72);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    SearchConfig sc = SearchConfig::from_params(inst.params, 9);
    sc.n_iter = 40;
    const SearchResult res = run_search(inst, graph, sc);
    const VerifyReport rep = verify(inst, graph, res.best);
    INFO(rep.to_string());
    CHECK(rep.ok());
}

TEST_CASE("operator mask validation") {
    SearchConfig sc;
    sc.disabled_ops = {"d_random", "d_worst", "d_related", "d_route"};
    CHECK_THROWS(sc.validate());
    sc.disabled_ops = {"bogus"};
    CHECK_THROWS(sc.validate());
    sc.disabled_ops = {"d_random", "r_TP", "ls_walk_to_bus"};
    CHECK_NOTHROW(sc.validate());
}

TEST_CASE("multi-run reduction picks the best seed deterministically") {
    GeneratorConfig cfg;
    cfg.n = 8;
    const Instance inst = generate(cfg, 73);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    SearchConfig sc = SearchConfig::from_params(inst.params, 100);
    sc.n_iter = 40;
    const SearchResult serial = run_multi(inst, graph, sc, 3, 1);
    const SearchResult parallel = run_multi(inst, graph, sc, 3, 3);
    CHECK(serial.best.objective_cache == parallel.best.objective_cache);
    double best = 1e18;
    for (int i = 0; i < 3; ++i) {
        SearchConfig c = sc;
        c.seed = 100 + static_cast<std::uint64_t>(i);
        best = std::min(best, run_search(inst, graph, c).best.objective_cache);
    }
    CHECK(serial.best.objective_cache == doctest::Approx(best));
}
