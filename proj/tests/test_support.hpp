#pragma once

#include <vector>

#include "eidarp/generator.hpp"
#include "eidarp/instance.hpp"
#include "eidarp/rng.hpp"
#include "eidarp/solution.hpp"
#include "eidarp/transit.hpp"

namespace eidarp::test {

// Two-line timetable fixture: line 0 (A-B-C-D, three runs) and line 1
// (E-F-G-H, two runs) crossing at B/F and D/H. Under eta in [1, 10] exactly
// two transfer arcs survive: 2 -> 6 (3 min) and 14 -> 10 (4 min); the
// 14-minute transfer 2 -> 14 is pruned. 20 transit nodes in total.
inline Instance two_line_timetable_instance() {
    Instance inst;
    inst.params.gamma = 10.0;
    inst.params.eta_min = 1.0;
    inst.params.eta_max = 10.0;
    inst.params.t_end = 120.0;

    TransitLine l1;
    l1.id = 0;
    l1.stations = {{0.0, 8.0}, {5.0, 8.0}, {10.0, 8.0}, {15.0, 8.0}};  // A B C D
    l1.runs = {{false, {15.0, 26.0, 32.0, 38.0}},
               {false, {33.0, 44.0, 50.0, 56.0}},
               {false, {47.0, 58.0, 64.0, 70.0}}};
    l1.speed = 50.0 / 60.0;

    TransitLine l2;
    l2.id = 1;
    l2.stations = {{5.0, 2.0}, {5.0, 8.0}, {10.0, 12.0}, {15.0, 8.0}};  // E F G H
    l2.runs = {{false, {23.0, 29.0, 35.0, 41.0}}, {false, {34.0, 40.0, 46.0, 52.0}}};
    l2.speed = 50.0 / 60.0;

    inst.lines = {l1, l2};
    inst.depots = {{4.0, 4.0}};
    Charger c;
    c.id = 0;
    c.location = inst.depots[0];
    c.power = 0.83;
    inst.chargers = {c};
    Bus b;
    b.id = 0;
    b.capacity = 15;
    b.consumption = 0.552;
    b.battery_capacity = 69.0;
    b.e_min = 6.9;
    b.e_max = 55.2;
    b.e_init = 55.2;
    b.origin_depot = 0;
    b.dest_depot = 0;
    b.speed = 25.0 / 60.0;
    inst.buses = {b};
    inst.finalize();
    return inst;
}

// Tiny-instance settings used by the exact-oracle comparisons: one line with
// two departures (one per direction), two buses, a couple of customers.
inline GeneratorConfig tiny_config(int n, double init_soc = 1.0) {
    GeneratorConfig cfg;
    cfg.n = n;
    cfg.fleet = 2;
    cfg.layout = "one";
    cfg.departures_per_direction = 1;
    cfg.first_departure = 30.0;
    cfg.n_depots = 2;
    cfg.init_soc_fraction = init_soc;
    return cfg;
}

// Random structurally-valid route over a few customers of `inst`, possibly
// with transit legs taken from the customers' TP sets. Journeys are written
// into `sol`. Returns false when the draw produced no stops.
inline bool fuzz_route(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                       int bus, Rng& rng, Route& out) {
    std::vector<int> ids;
    for (int i = 0; i < inst.n(); ++i)
        if (!sol.journeys[static_cast<std::size_t>(i)].served()) ids.push_back(i);
    if (ids.empty()) return false;
    rng.shuffle(ids);
    const int m = 1 + static_cast<int>(rng.next_below(3));

    struct Ev {
        Stop stop;
        int rank;  // pickup 0, alight 1, board 2, dropoff 3
        int request;
    };
    std::vector<Ev> events;
    for (int c = 0; c < m && c < static_cast<int>(ids.size()); ++c) {
        const int r = ids[static_cast<std::size_t>(c)];
        const auto& tps = graph.per_customer[static_cast<std::size_t>(r)];
        Journey j;
        j.request = r;
        // Prefer a transit journey when a usable TP exists and the coin says so.
        int pick_tp = -1;
        std::uint8_t flags = 0;
        if (!tps.empty() && rng.uniform01() < 0.5) {
            const auto& ctp = tps[static_cast<std::size_t>(rng.next_below(tps.size()))];
            pick_tp = ctp.tp;
            flags = ctp.options;
        }
        if (pick_tp >= 0 && (flags & (kOpt2 | kOpt4))) {
            const auto& tp = graph.tps[static_cast<std::size_t>(pick_tp)];
            j.option = (flags & kOpt4) ? 4 : 2;
            j.tp = pick_tp;
            j.first_mode = LegMode::Bus;
            j.first_bus = bus;
            j.transit_time = tp.travel_time;
            Stop pu;
            pu.kind = StopKind::Pickup;
            pu.ref = r;
            Stop tr;
            tr.kind = StopKind::Transit;
            tr.ref = tp.entry;
            tr.alight.push_back(r);
            events.push_back({pu, 0, r});
            events.push_back({tr, 1, r});
            if (j.option == 4) {
                j.last_mode = LegMode::Bus;
                j.last_bus = bus;
                Stop tx;
                tx.kind = StopKind::Transit;
                tx.ref = tp.exit;
                tx.board.push_back(r);
                Stop dx;
                dx.kind = StopKind::Dropoff;
                dx.ref = r;
                events.push_back({tx, 2, r});
                events.push_back({dx, 3, r});
            } else {
                j.last_mode = LegMode::Walk;
                const auto& req = inst.requests[static_cast<std::size_t>(r)];
                j.last_time = std::max(
                    0.0, walk_time_or_reject(graph.node(tp.exit).location, req.destination,
                                             inst.params));
                j.walk_time = j.last_time;
                j.arr = graph.node(tp.exit).theta_arr + j.last_time;
            }
        } else {
            j.option = 5;
            j.first_mode = LegMode::Bus;
            j.first_bus = bus;
            Stop pu;
            pu.kind = StopKind::Pickup;
            pu.ref = r;
            Stop dx;
            dx.kind = StopKind::Dropoff;
            dx.ref = r;
            events.push_back({pu, 0, r});
            events.push_back({dx, 3, r});
        }
        sol.journeys[static_cast<std::size_t>(r)] = j;
    }
    // random order respecting per-request rank precedence
    out = empty_route(inst, bus);
    std::vector<char> placed(events.size(), 0);
    std::size_t remaining = events.size();
    while (remaining > 0) {
        std::vector<int> ready;
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (placed[i]) continue;
            bool ok = true;
            for (std::size_t k = 0; k < events.size(); ++k)
                if (!placed[k] && k != i && events[k].request == events[i].request &&
                    events[k].rank < events[i].rank)
                    ok = false;
            if (ok) ready.push_back(static_cast<int>(i));
        }
        const int pick = ready[static_cast<std::size_t>(rng.next_below(ready.size()))];
        placed[static_cast<std::size_t>(pick)] = 1;
        --remaining;
        const Stop& s = events[static_cast<std::size_t>(pick)].stop;
        Stop* back = out.stops.size() >= 2 ? &out.stops[out.stops.size() - 2] : nullptr;
        if (s.kind == StopKind::Transit && back && back->kind == StopKind::Transit &&
            back->ref == s.ref) {
            for (int x : s.board) back->board.push_back(x);
            for (int x : s.alight) back->alight.push_back(x);
        } else {
            out.stops.insert(out.stops.end() - 1, s);
        }
    }
    return out.stops.size() > 2;
}

// Journeys of a coupled route set, for the schedule oracle.
inline std::vector<Journey> journeys_of(const Solution& sol) {
    std::vector<Journey> out;
    for (const auto& j : sol.journeys)
        if (j.served()) out.push_back(j);
    return out;
}

}  // namespace eidarp::test
