#include <doctest.h>

#include <algorithm>

#include "eidarp/transit.hpp"
#include "test_support.hpp"

using namespace eidarp;

TEST_CASE("two-line timetable expands to 20 nodes with the known numbering") {
    const Instance inst = test::two_line_timetable_instance();
    const auto nodes = expand_timetables(inst.lines, inst.params.gamma);
    REQUIRE(nodes.size() == 20);
    // ids are 1-based in run-start order
    CHECK(nodes[1].id == 2);
    CHECK(nodes[1].line_id == 0);
    CHECK(nodes[1].theta_dep == doctest::Approx(26.0));
    CHECK(nodes[5].id == 6);
    CHECK(nodes[5].line_id == 1);
    CHECK(nodes[5].theta_dep == doctest::Approx(29.0));
    CHECK(nodes[13].id == 14);
    CHECK(nodes[13].line_id == 1);
    CHECK(nodes[13].theta_dep == doctest::Approx(40.0));
    for (const auto& n : nodes) {
        CHECK(n.theta_arr <= n.theta_dep + kEpsTime);
        CHECK(n.tw.e <= n.tw.l);
    }
}

TEST_CASE("eta window keeps the 3-minute transfer and prunes the 14-minute one") {
    const Instance inst = test::two_line_timetable_instance();
    const auto nodes = expand_timetables(inst.lines, inst.params.gamma);
    const auto gen = generate_transit_pairs(nodes, 1.0, 10.0);
    REQUIRE(gen.transfer_arcs.size() == 2);
    auto has = [&](int from, int to) {
        return std::any_of(gen.transfer_arcs.begin(), gen.transfer_arcs.end(),
                           [&](const TransferArc& t) { return t.from == from && t.to == to; });
    };
    CHECK(has(2, 6));
    CHECK_FALSE(has(2, 14));
    CHECK(has(14, 10));
    for (const auto& t : gen.transfer_arcs) CHECK(t.wait == doctest::Approx(t.to == 6 ? 3.0 : 4.0));

    // 30 intra-run pairs plus 4 transfer-reachable pairs
    CHECK(gen.tps.size() == 34);
    // a cross-line pair goes through the kept transfer: A(run 1) to G(line 2)
    bool found = false;
    for (const auto& tp : gen.tps)
        if (tp.entry == 1 && tp.exit == 7) {
            found = true;
            CHECK(tp.travel_time == doctest::Approx(20.0));
            CHECK(tp.transfers == 1);
        }
    CHECK(found);
}

TEST_CASE("single run yields all ordered station pairs with additive times") {
    TransitLine line;
    line.id = 0;
    line.stations = {{0.0, 0.0}, {5.0, 0.0}, {10.0, 0.0}};
    line.runs = {{false, {10.0, 16.0, 22.0}}};
    const auto nodes = expand_timetables({line}, 10.0);
    REQUIRE(nodes.size() == 3);
    const auto gen = generate_transit_pairs(nodes, 1.0, 10.0);
    REQUIRE(gen.tps.size() == 3);
    auto time_of = [&](int a, int b) {
        for (const auto& tp : gen.tps)
            if (tp.entry == a && tp.exit == b) return tp.travel_time;
        return -1.0;
    };
    CHECK(time_of(1, 2) == doctest::Approx(6.0));
    CHECK(time_of(2, 3) == doctest::Approx(6.0));
    CHECK(time_of(1, 3) == doctest::Approx(12.0));
}

TEST_CASE("empty and degenerate expansions") {
    CHECK(expand_timetables({}, 10.0).empty());
    const Instance inst = test::two_line_timetable_instance();
    const auto nodes = expand_timetables(inst.lines, inst.params.gamma);
    // eta_max below eta_min leaves only intra-run pairs
    const auto gen = generate_transit_pairs(nodes, 10.0, 1.0);
    CHECK(gen.transfer_arcs.empty());
    CHECK(gen.tps.size() == 30);
}

TEST_CASE("adding a line adds |D| * |F| nodes") {
    Instance inst = test::two_line_timetable_instance();
    const auto before = expand_timetables(inst.lines, inst.params.gamma).size();
    TransitLine extra;
    extra.id = 2;
    extra.stations = {{0.0, 0.0}, {2.0, 2.0}, {4.0, 4.0}};
    extra.runs = {{false, {5.0, 11.0, 17.0}}, {false, {60.0, 66.0, 72.0}}};
    inst.lines.push_back(extra);
    const auto after = expand_timetables(inst.lines, inst.params.gamma).size();
    CHECK(after - before == 2 * 3);
}

TEST_CASE("customer TP sets match a direct evaluation of the option criteria") {
    GeneratorConfig cfg;
    cfg.n = 20;
    const Instance inst = generate(cfg, 5);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    const double speed = inst.ref_bus_speed();
    const double mu = inst.params.service_time;

    for (int r = 0; r < inst.n(); ++r) {
        const auto& req = inst.requests[static_cast<std::size_t>(r)];
        // Oracle: test every (TP, option) pair against the inequality blocks.
        std::vector<CustomerTp> expect;
        for (std::size_t t = 0; t < graph.tps.size(); ++t) {
            const auto& tp = graph.tps[t];
            const auto& ni = graph.node(tp.entry);
            const auto& nj = graph.node(tp.exit);
            const double tw_o = walk_time_or_reject(req.origin, ni.location, inst.params);
            const double tw_d = walk_time_or_reject(nj.location, req.destination, inst.params);
            const double tb_o = bus_travel_time(req.origin, ni.location, speed);
            const double tb_d = bus_travel_time(nj.location, req.destination, speed);
            const bool ow = tw_o >= 0 && req.otw().e + tw_o <= ni.theta_dep + kEpsTime &&
                            req.otw().l + tw_o >= ni.theta_dep - inst.params.gamma - kEpsTime;
            const bool ob = req.otw().e + tb_o <= ni.theta_dep + kEpsTime &&
                            req.otw().l + tb_o >= ni.theta_dep - inst.params.gamma - kEpsTime;
            const bool dw = tw_d >= 0 && nj.theta_arr + tw_d <= req.dtw().l + kEpsTime &&
                            nj.theta_arr + tw_d + inst.params.gamma >= req.dtw().e - kEpsTime;
            const bool db = nj.theta_arr + tb_d <= req.dtw().l + kEpsTime &&
                            nj.theta_arr + tb_d + inst.params.gamma >= req.dtw().e - kEpsTime;
            auto fits = [&](double a, double b) {
                return a + tp.travel_time + b <= req.max_travel_time + kEpsTime;
            };
            std::uint8_t f = 0;
            if (ow && dw && fits(tw_o, tw_d)) f |= kOpt1;
            if (ob && dw && fits(mu + tb_o, tw_d)) f |= kOpt2;
            if (ow && db && fits(tw_o, mu + tb_d)) f |= kOpt3;
            if (ob && db && fits(mu + tb_o, mu + tb_d)) f |= kOpt4;
            if (f) expect.push_back({static_cast<int>(t), f});
        }
        const auto& got = graph.per_customer[static_cast<std::size_t>(r)];
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].tp == expect[i].tp);
            CHECK(got[i].options == expect[i].options);
        }
    }
}

TEST_CASE("request after the last departure has no TPs") {
    Instance inst = test::two_line_timetable_instance();
    Request r;
    r.id = 0;
    r.origin = {5.0, 8.0};
    r.destination = {15.0, 8.0};
    r.origin_given = true;
    r.origin_tw = TimeWindow{100.0, 115.0};
    inst.requests = {r};
    inst.finalize();
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    CHECK(graph.per_customer[0].empty());
}

TEST_CASE("origin at a station qualifies with zero walk") {
    Instance inst = test::two_line_timetable_instance();
    Request r;
    r.id = 0;
    r.origin = {0.0, 8.0};        // station A
    r.destination = {15.0, 8.0};  // station D
    r.origin_given = true;
    r.origin_tw = TimeWindow{5.0, 20.0};  // e + 0 <= theta_1 = 15 <= l + gamma
    inst.requests = {r};
    inst.finalize();
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    bool opt1 = false;
    for (const auto& ctp : graph.per_customer[0]) {
        const auto& tp = graph.tps[static_cast<std::size_t>(ctp.tp)];
        if (tp.entry == 1 && tp.exit == 4 && (ctp.options & kOpt1)) opt1 = true;
    }
    CHECK(opt1);
}

TEST_CASE("expansion is deterministic and the parallel path matches the serial one") {
    GeneratorConfig cfg;
    cfg.n = 15;
    cfg.layout = "three";
    const Instance inst = generate(cfg, 9);
    const auto nodes = expand_timetables(inst.lines, inst.params.gamma);
    const auto a = generate_transit_pairs(nodes, inst.params.eta_min, inst.params.eta_max, true);
    const auto b = generate_transit_pairs_serial(nodes, inst.params.eta_min, inst.params.eta_max);
    REQUIRE(a.tps.size() == b.tps.size());
    for (std::size_t i = 0; i < a.tps.size(); ++i) {
        CHECK(a.tps[i].entry == b.tps[i].entry);
        CHECK(a.tps[i].exit == b.tps[i].exit);
        CHECK(a.tps[i].travel_time == doctest::Approx(b.tps[i].travel_time));
    }
    const ExpandedTransitGraph g1 = build_transit_graph(inst, true);
    const ExpandedTransitGraph g2 = build_transit_graph(inst, false);
    CHECK(nodes_csv(g1) == nodes_csv(g2));
    CHECK(tps_csv(g1) == tps_csv(g2));
}
