#include "eidarp/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eidarp/stp.hpp"

namespace eidarp {

namespace {

constexpr double kGrid = 0.1;  // minutes, charging duration grid

struct Pattern {
    int option = 0;  // 0 = reject
    int tp = -1;
    int first_bus = -1;
    int last_bus = -1;
};

struct Event {
    StopKind kind;
    int ref;
    int request;
    bool board;  // transit: board vs alight
};

double lbar_of(const Instance& inst, const ExpandedTransitGraph& graph,
               const std::vector<Route>& routes, const Journey& j) {
    if (!j.served()) return 0.0;
    auto route_of = [&](int bus) -> const Route& {
        for (const auto& r : routes)
            if (r.bus == bus) return r;
        throw std::runtime_error("lbar_of: missing route");
    };
    const auto& req = inst.requests[static_cast<std::size_t>(j.request)];
    if (j.option == 5) {
        const Route& r = route_of(j.first_bus);
        return onboard_time(inst, graph, r, r.find_stop(StopKind::Pickup, j.request),
                            r.find_stop(StopKind::Dropoff, j.request));
    }
    const auto& tp = graph.tps[static_cast<std::size_t>(j.tp)];
    double lbar = tp.travel_time;
    if (j.first_mode == LegMode::Walk)
        lbar += walk_time_or_reject(req.origin, graph.node(tp.entry).location, inst.params);
    else {
        const Route& r = route_of(j.first_bus);
        lbar += onboard_time(inst, graph, r, r.find_stop(StopKind::Pickup, j.request),
                             r.find_transit_stop_with_alight(j.request));
    }
    if (j.last_mode == LegMode::Walk)
        lbar += walk_time_or_reject(graph.node(tp.exit).location, req.destination, inst.params);
    else {
        const Route& r = route_of(j.last_bus);
        lbar += onboard_time(inst, graph, r, r.find_transit_stop_with_board(j.request),
                             r.find_stop(StopKind::Dropoff, j.request));
    }
    return lbar;
}

Journey journey_from_pattern(const Instance& inst, const ExpandedTransitGraph& graph, int request,
                             const Pattern& pat) {
    Journey j;
    j.request = request;
    j.option = pat.option;
    j.tp = pat.tp;
    if (pat.option == 0) return j;
    const auto& req = inst.requests[static_cast<std::size_t>(request)];
    if (pat.option == 5) {
        j.first_mode = LegMode::Bus;
        j.first_bus = pat.first_bus;
        return j;
    }
    const auto& tp = graph.tps[static_cast<std::size_t>(pat.tp)];
    j.transit_time = tp.travel_time;
    if (pat.option == 1 || pat.option == 3) {
        j.first_mode = LegMode::Walk;
        j.first_time = walk_time_or_reject(req.origin, graph.node(tp.entry).location, inst.params);
        j.walk_time += j.first_time;
        j.dep = graph.node(tp.entry).theta_dep - j.first_time;
    } else {
        j.first_mode = LegMode::Bus;
        j.first_bus = pat.first_bus;
    }
    if (pat.option == 1 || pat.option == 2) {
        j.last_mode = LegMode::Walk;
        j.last_time =
            walk_time_or_reject(graph.node(tp.exit).location, req.destination, inst.params);
        j.walk_time += j.last_time;
        j.arr = graph.node(tp.exit).theta_arr + j.last_time;
    } else {
        j.last_mode = LegMode::Bus;
        j.last_bus = pat.last_bus;
    }
    return j;
}

struct Enumerator {
    const Instance& inst;
    const ExpandedTransitGraph& graph;
    std::vector<std::vector<Pattern>> patterns;   // per customer
    std::vector<std::vector<double>> pattern_lb;  // additive cost lower bound per pattern
    std::vector<Pattern> chosen;
    std::vector<double> chosen_lb;
    std::vector<double> suffix_min_lb;  // sum of cheapest pattern bounds from depth d on
    double best_obj = std::numeric_limits<double>::infinity();
    Solution best;
    bool found = false;

    // Additive lower bound of one pattern: the customer's unavoidable
    // in-motion time (weighted) or the rejection penalty. Bus legs are
    // bounded by the beeline driving time of the leg.
    double bound_of(int r, const Pattern& pat) const {
        const auto& req = inst.requests[static_cast<std::size_t>(r)];
        if (pat.option == 0) return inst.params.omega;
        if (pat.option == 5) return inst.params.lambda2 * req.direct_bus_time;
        const auto& tp = graph.tps[static_cast<std::size_t>(pat.tp)];
        const auto& entry = graph.node(tp.entry);
        const auto& exit = graph.node(tp.exit);
        const double speed = inst.ref_bus_speed();
        double lb = inst.params.lambda2 * tp.travel_time;
        if (pat.option == 1 || pat.option == 3)
            lb += inst.params.lambda2 *
                  std::max(0.0, walk_time_or_reject(req.origin, entry.location, inst.params));
        else
            lb += inst.params.lambda2 * bus_travel_time(req.origin, entry.location, speed);
        if (pat.option == 1 || pat.option == 2)
            lb += inst.params.lambda2 *
                  std::max(0.0, walk_time_or_reject(exit.location, req.destination, inst.params));
        else
            lb += inst.params.lambda2 * bus_travel_time(exit.location, req.destination, speed);
        return lb;
    }

    void make_patterns() {
        patterns.resize(static_cast<std::size_t>(inst.n()));
        pattern_lb.resize(patterns.size());
        for (int r = 0; r < inst.n(); ++r) {
            auto& out = patterns[static_cast<std::size_t>(r)];
            const auto& req = inst.requests[static_cast<std::size_t>(r)];
            if (!req.bus_window_empty)
                for (int k = 0; k < static_cast<int>(inst.buses.size()); ++k)
                    out.push_back({5, -1, k, -1});
            for (const auto& ctp : graph.per_customer[static_cast<std::size_t>(r)]) {
                const auto& tp = graph.tps[static_cast<std::size_t>(ctp.tp)];
                const auto& entry = graph.node(tp.entry);
                const auto& exit = graph.node(tp.exit);
                const double walk_in =
                    walk_time_or_reject(req.origin, entry.location, inst.params);
                const double walk_out =
                    walk_time_or_reject(exit.location, req.destination, inst.params);
                const bool win = walk_in >= 0.0 &&
                                 entry.theta_dep - walk_in >= req.otw().e - kEpsTime &&
                                 entry.theta_dep - walk_in <= req.otw().l + kEpsTime;
                const bool wout = walk_out >= 0.0 &&
                                  exit.theta_arr + walk_out >= req.dtw().e - kEpsTime &&
                                  exit.theta_arr + walk_out <= req.dtw().l + kEpsTime;
                if ((ctp.options & kOpt1) && win && wout) {
                    const double L = (exit.theta_arr + walk_out) - (entry.theta_dep - walk_in);
                    if (L <= req.max_travel_time + kEpsTime) out.push_back({1, ctp.tp, -1, -1});
                }
                for (int k = 0; k < static_cast<int>(inst.buses.size()); ++k) {
                    if ((ctp.options & kOpt2) && wout) out.push_back({2, ctp.tp, k, -1});
                    if ((ctp.options & kOpt3) && win) out.push_back({3, ctp.tp, -1, k});
                    if (ctp.options & kOpt4)
                        for (int k2 = 0; k2 < static_cast<int>(inst.buses.size()); ++k2)
                            out.push_back({4, ctp.tp, k, k2});
                }
            }
            out.push_back({0, -1, -1, -1});
            auto& lbs = pattern_lb[static_cast<std::size_t>(r)];
            for (const auto& pat : out) lbs.push_back(bound_of(r, pat));
            // cheapest patterns first makes the incumbent tight early
            std::vector<std::size_t> order(out.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return lbs[a] < lbs[b]; });
            std::vector<Pattern> out2;
            std::vector<double> lbs2;
            for (std::size_t i : order) {
                out2.push_back(out[i]);
                lbs2.push_back(lbs[i]);
            }
            out = std::move(out2);
            lbs = std::move(lbs2);
        }
    }

    void prepare_suffix_bounds() {
        suffix_min_lb.assign(static_cast<std::size_t>(inst.n()) + 1, 0.0);
        for (int r = inst.n() - 1; r >= 0; --r) {
            double mn = std::numeric_limits<double>::infinity();
            for (double v : pattern_lb[static_cast<std::size_t>(r)]) mn = std::min(mn, v);
            suffix_min_lb[static_cast<std::size_t>(r)] =
                suffix_min_lb[static_cast<std::size_t>(r) + 1] + mn;
        }
    }

    void assign(int depth, double lb) {
        if (lb + suffix_min_lb[static_cast<std::size_t>(depth)] >= best_obj - 1e-9) return;
        if (depth == inst.n()) {
            evaluate_assignment();
            return;
        }
        const auto& pats = patterns[static_cast<std::size_t>(depth)];
        const auto& lbs = pattern_lb[static_cast<std::size_t>(depth)];
        const double tail = suffix_min_lb[static_cast<std::size_t>(depth) + 1];
        for (std::size_t i = 0; i < pats.size(); ++i) {
            const double nlb = lb + lbs[i];
            if (nlb + tail >= best_obj - 1e-9) continue;
            chosen[static_cast<std::size_t>(depth)] = pats[i];
            chosen_lb[static_cast<std::size_t>(depth)] = lbs[i];
            assign(depth + 1, nlb);
        }
    }

    // ---- per-assignment routing enumeration ----
    std::vector<Journey> journeys_now;
    double assign_lb = 0.0;       // additive lambda2/omega bound of the assignment
    double done_routes_time = 0.0;  // lambda1 time of buses already ordered

    void evaluate_assignment() {
        assign_lb = 0.0;
        for (int r = 0; r < inst.n(); ++r) assign_lb += chosen_lb[static_cast<std::size_t>(r)];
        done_routes_time = 0.0;
        journeys_now.clear();
        std::vector<std::vector<Event>> events(inst.buses.size());
        for (int r = 0; r < inst.n(); ++r) {
            const Pattern& pat = chosen[static_cast<std::size_t>(r)];
            journeys_now.push_back(journey_from_pattern(inst, graph, r, pat));
            if (pat.option == 5) {
                events[static_cast<std::size_t>(pat.first_bus)].push_back(
                    {StopKind::Pickup, r, r, false});
                events[static_cast<std::size_t>(pat.first_bus)].push_back(
                    {StopKind::Dropoff, r, r, false});
            } else if (pat.option >= 2 && pat.option <= 4) {
                const auto& tp = graph.tps[static_cast<std::size_t>(pat.tp)];
                if (pat.option == 2 || pat.option == 4) {
                    events[static_cast<std::size_t>(pat.first_bus)].push_back(
                        {StopKind::Pickup, r, r, false});
                    events[static_cast<std::size_t>(pat.first_bus)].push_back(
                        {StopKind::Transit, tp.entry, r, false});
                }
                if (pat.option == 3 || pat.option == 4) {
                    events[static_cast<std::size_t>(pat.last_bus)].push_back(
                        {StopKind::Transit, tp.exit, r, true});
                    events[static_cast<std::size_t>(pat.last_bus)].push_back(
                        {StopKind::Dropoff, r, r, false});
                }
            }
        }
        // enumerate orderings bus by bus
        std::vector<Route> routes;
        order_bus(0, events, routes);
    }

    static int load_delta(const Event& e) {
        if (e.kind == StopKind::Pickup) return 1;
        if (e.kind == StopKind::Dropoff) return -1;
        return e.board ? 1 : -1;
    }

    // precedence: event a must come before b
    static bool must_precede(const Event& a, const Event& b) {
        if (a.request != b.request) return false;
        auto rank = [](const Event& e) {
            if (e.kind == StopKind::Pickup) return 0;
            if (e.kind == StopKind::Transit && !e.board) return 1;
            if (e.kind == StopKind::Transit && e.board) return 2;
            return 3;  // dropoff
        };
        return rank(a) < rank(b);
    }

    void order_bus(std::size_t bus, const std::vector<std::vector<Event>>& events,
                   std::vector<Route>& routes) {
        if (bus == inst.buses.size()) {
            evaluate_routing(routes);
            return;
        }
        const auto& evs = events[bus];
        if (evs.empty()) {
            order_bus(bus + 1, events, routes);
            return;
        }
        std::vector<int> perm;
        std::vector<char> used(evs.size(), 0);
        const Point depot =
            inst.depots[static_cast<std::size_t>(inst.buses[bus].origin_depot)];
        permute(bus, evs, used, perm, 0, events, routes, 0.0, depot);
    }

    Point event_location(const Event& e) const {
        if (e.kind == StopKind::Transit) return graph.node(e.ref).location;
        const auto& req = inst.requests[static_cast<std::size_t>(e.request)];
        return e.kind == StopKind::Pickup ? req.origin : req.destination;
    }

    void permute(std::size_t bus, const std::vector<Event>& evs, std::vector<char>& used,
                 std::vector<int>& perm, int load, const std::vector<std::vector<Event>>& events,
                 std::vector<Route>& routes, double prefix_time, Point last_loc) {
        // partial-cost bound: completed routes + this prefix + additive legs
        if (inst.params.lambda1 * (done_routes_time + prefix_time) + assign_lb >=
            best_obj - 1e-9)
            return;
        if (perm.size() == evs.size()) {
            Route r;
            r.bus = static_cast<int>(bus);
            const Bus& b = inst.buses[bus];
            Stop start;
            start.kind = StopKind::DepotStart;
            start.ref = b.origin_depot;
            r.stops.push_back(start);
            for (int idx : perm) {
                const Event& e = evs[static_cast<std::size_t>(idx)];
                if (e.kind == StopKind::Transit && !r.stops.empty() &&
                    r.stops.back().kind == StopKind::Transit && r.stops.back().ref == e.ref) {
                    (e.board ? r.stops.back().board : r.stops.back().alight).push_back(e.request);
                } else {
                    Stop s;
                    s.kind = e.kind;
                    s.ref = e.kind == StopKind::Transit ? e.ref : e.request;
                    if (e.kind == StopKind::Transit)
                        (e.board ? s.board : s.alight).push_back(e.request);
                    r.stops.push_back(s);
                }
            }
            Stop end;
            end.kind = StopKind::DepotEnd;
            end.ref = b.dest_depot;
            r.stops.push_back(end);
            const double full_time = route_travel_time(inst, graph, r);
            routes.push_back(std::move(r));
            done_routes_time += full_time;
            order_bus(bus + 1, events, routes);
            done_routes_time -= full_time;
            routes.pop_back();
            return;
        }
        for (std::size_t i = 0; i < evs.size(); ++i) {
            if (used[i]) continue;
            bool ok = true;
            for (std::size_t jx = 0; jx < evs.size(); ++jx)
                if (!used[jx] && jx != i && must_precede(evs[jx], evs[i])) ok = false;
            if (!ok) continue;
            const int nl = load + load_delta(evs[i]);
            if (nl > inst.buses[bus].capacity || nl < 0) continue;
            const Point loc = event_location(evs[i]);
            const double hop = bus_travel_time(last_loc, loc, inst.buses[bus].speed);
            used[i] = 1;
            perm.push_back(static_cast<int>(i));
            permute(bus, evs, used, perm, nl, events, routes, prefix_time + hop, loc);
            perm.pop_back();
            used[i] = 0;
        }
    }

    // SoC along a route; returns minimum slack to E_min and soc values.
    struct SocProfile {
        std::vector<double> soc;
        double min_soc;
    };
    SocProfile soc_of(const Route& r) const {
        const Bus& b = inst.buses[static_cast<std::size_t>(r.bus)];
        SocProfile out;
        double e = b.e_init;
        out.soc.push_back(e);
        out.min_soc = e;
        for (std::size_t p = 1; p < r.stops.size(); ++p) {
            e -= distance_km(stop_location(inst, graph, r.stops[p - 1]),
                             stop_location(inst, graph, r.stops[p])) *
                 b.consumption;
            out.soc.push_back(e);
            out.min_soc = std::min(out.min_soc, e);
        }
        return out;
    }

    double routing_objective(const std::vector<Route>& routes) const {
        double obj = 0.0;
        for (const auto& r : routes) obj += inst.params.lambda1 * route_travel_time(inst, graph, r);
        for (const auto& j : journeys_now) {
            if (!j.served())
                obj += inst.params.omega;
            else
                obj += inst.params.lambda2 * lbar_of(inst, graph, routes, j);
        }
        return obj;
    }

    void evaluate_routing(const std::vector<Route>& routes) {
        const double base_obj = routing_objective(routes);
        if (base_obj >= best_obj - 1e-9) return;

        std::vector<int> deficient;
        for (std::size_t ri = 0; ri < routes.size(); ++ri) {
            const Bus& b = inst.buses[static_cast<std::size_t>(routes[ri].bus)];
            if (routes[ri].stops.size() > 2 && soc_of(routes[ri]).min_soc < b.e_min - kEpsEnergy)
                deficient.push_back(static_cast<int>(ri));
        }

        if (deficient.empty()) {
            if (routes.empty()) {  // walk/transit-only assignment, nothing to schedule
                record(routes, {}, {}, base_obj);
                return;
            }
            auto assignment = schedule_assignment(inst, graph, routes, journeys_now);
            if (assignment.empty()) return;
            record(routes, {}, assignment, base_obj);
            return;
        }
        enumerate_charging(routes, deficient, base_obj);
    }

    struct Placement {
        int route_index;
        int after_stop;
        int charger;
    };

    // Candidate single/double event placements for one deficient route.
    std::vector<std::vector<Placement>> placements_for(const std::vector<Route>& routes,
                                                       int ri) const {
        const Route& r = routes[static_cast<std::size_t>(ri)];
        std::vector<int> zero_pos;
        int load = 0;
        for (std::size_t p = 0; p + 1 < r.stops.size(); ++p) {
            const Stop& s = r.stops[p];
            if (s.kind == StopKind::Pickup) ++load;
            if (s.kind == StopKind::Dropoff) --load;
            if (s.kind == StopKind::Transit)
                load += static_cast<int>(s.board.size()) - static_cast<int>(s.alight.size());
            if (load == 0) zero_pos.push_back(static_cast<int>(p));
        }
        std::vector<std::vector<Placement>> out;
        for (int p : zero_pos)
            for (int c = 0; c < static_cast<int>(inst.chargers.size()); ++c)
                out.push_back({{ri, p, c}});
        for (std::size_t a = 0; a < zero_pos.size(); ++a)
            for (std::size_t b = a + 1; b < zero_pos.size(); ++b)
                for (int c1 = 0; c1 < static_cast<int>(inst.chargers.size()); ++c1)
                    for (int c2 = 0; c2 < static_cast<int>(inst.chargers.size()); ++c2)
                        out.push_back({{ri, zero_pos[a], c1}, {ri, zero_pos[b], c2}});
        return out;
    }

    Route splice_events(const Route& base, const std::vector<Placement>& pls,
                        const std::vector<double>& durations, std::vector<int>* stop_of) const {
        Route r = base;
        std::vector<int> order(pls.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return pls[static_cast<std::size_t>(a)].after_stop >
                                             pls[static_cast<std::size_t>(b)].after_stop; });
        if (stop_of) stop_of->assign(pls.size(), -1);
        for (int i : order) {
            const auto& pl = pls[static_cast<std::size_t>(i)];
            Stop s;
            s.kind = StopKind::Charger;
            s.ref = pl.charger;
            s.charge_duration = durations[static_cast<std::size_t>(i)];
            r.stops.insert(r.stops.begin() + pl.after_stop + 1, s);
        }
        if (stop_of) {
            // positions after splicing (earlier splices shift later ones)
            std::vector<int> sorted_pos;
            for (const auto& pl : pls) sorted_pos.push_back(pl.after_stop);
            for (std::size_t i = 0; i < pls.size(); ++i) {
                int shift = 0;
                for (std::size_t k = 0; k < pls.size(); ++k)
                    if (pls[k].after_stop < pls[i].after_stop) ++shift;
                (*stop_of)[i] = pls[i].after_stop + 1 + shift;
            }
        }
        return r;
    }

    // Required duration for each event of one route given placements, or
    // empty when the route cannot be repaired this way. Durations on a grid
    // when two events interact.
    std::vector<std::vector<double>> duration_options(const std::vector<Route>& routes,
                                                      const std::vector<Placement>& pls) const {
        const Route& base = routes[static_cast<std::size_t>(pls[0].route_index)];
        const Bus& bus = inst.buses[static_cast<std::size_t>(base.bus)];
        std::vector<std::vector<double>> out;

        // soc profile of the spliced route with zero-duration events
        std::vector<int> stop_of;
        const Route spliced = splice_events(base, pls, std::vector<double>(pls.size(), 0.0),
                                            &stop_of);
        const SocProfile prof = soc_of(spliced);

        auto charger_power = [&](int c) { return inst.chargers[static_cast<std::size_t>(c)].power; };

        if (pls.size() == 1) {
            const int sp = stop_of[0];
            if (prof.soc[static_cast<std::size_t>(sp)] < bus.e_min - kEpsEnergy) return out;
            double deficit = 0.0;
            for (std::size_t p = static_cast<std::size_t>(sp) + 1; p < prof.soc.size(); ++p)
                deficit = std::max(deficit, bus.e_min - prof.soc[p]);
            if (deficit <= kEpsEnergy) return out;  // not actually deficient here
            const double cap = bus.e_max - prof.soc[static_cast<std::size_t>(sp)];
            if (deficit > cap + kEpsEnergy) return out;
            out.push_back({deficit / charger_power(pls[0].charger)});
            return out;
        }

        // two events
        const int s1 = stop_of[0], s2 = stop_of[1];
        if (prof.soc[static_cast<std::size_t>(s1)] < bus.e_min - kEpsEnergy) return out;
        double d1_need = 0.0;
        for (int p = s1 + 1; p <= s2; ++p)
            d1_need = std::max(d1_need, bus.e_min - prof.soc[static_cast<std::size_t>(p)]);
        double total_need = 0.0;
        for (std::size_t p = static_cast<std::size_t>(s2) + 1; p < prof.soc.size(); ++p)
            total_need = std::max(total_need, bus.e_min - prof.soc[p]);
        const double cap1 = bus.e_max - prof.soc[static_cast<std::size_t>(s1)];
        if (d1_need > cap1 + kEpsEnergy) return out;
        const double a1 = charger_power(pls[0].charger);
        const double a2 = charger_power(pls[1].charger);
        for (double e1 = std::max(0.0, d1_need); e1 <= cap1 + kEpsEnergy; e1 += kGrid * a1) {
            const double e2_need = std::max(0.0, total_need - e1);
            const double cap2 = bus.e_max - (prof.soc[static_cast<std::size_t>(s2)] + e1);
            if (e2_need > cap2 + kEpsEnergy) continue;
            if (e1 <= kEpsEnergy && e2_need <= kEpsEnergy) continue;
            out.push_back({e1 / a1, e2_need / a2});
        }
        return out;
    }

    void enumerate_charging(const std::vector<Route>& routes, const std::vector<int>& deficient,
                            double /*base_obj*/) {
        // Placement sets per deficient route, sorted by added detour cost so
        // the cheap single-event plans come first.
        std::vector<std::vector<std::vector<Placement>>> placements(deficient.size());
        for (std::size_t d = 0; d < deficient.size(); ++d) {
            placements[d] = placements_for(routes, deficient[d]);
            if (placements[d].empty()) return;
        }

        std::vector<std::size_t> pick(deficient.size(), 0);
        for (;;) {
            try_placement_combo(routes, deficient, placements, pick);
            std::size_t k = 0;
            while (k < pick.size()) {
                if (++pick[k] < placements[k].size()) break;
                pick[k] = 0;
                ++k;
            }
            if (k == pick.size()) break;
        }
    }

    void try_placement_combo(const std::vector<Route>& routes, const std::vector<int>& deficient,
                             const std::vector<std::vector<std::vector<Placement>>>& placements,
                             const std::vector<std::size_t>& pick) {
        // The objective depends only on the placements (durations are free),
        // so prune before touching the duration grid or the schedule system.
        double obj;
        {
            std::vector<Route> with_events = routes;
            for (std::size_t d = 0; d < deficient.size(); ++d) {
                const auto& pls = placements[d][pick[d]];
                with_events[static_cast<std::size_t>(deficient[d])] = splice_events(
                    routes[static_cast<std::size_t>(deficient[d])], pls,
                    std::vector<double>(pls.size(), 0.0), nullptr);
            }
            obj = routing_objective(with_events);
            if (obj >= best_obj - 1e-9) return;
        }

        std::vector<std::vector<std::vector<double>>> dur_options(deficient.size());
        for (std::size_t d = 0; d < deficient.size(); ++d) {
            dur_options[d] = duration_options(routes, placements[d][pick[d]]);
            if (dur_options[d].empty()) return;
        }

        std::vector<std::size_t> dpick(deficient.size(), 0);
        for (;;) {
            if (try_durations(routes, deficient, placements, pick, dur_options, dpick, obj))
                return;
            std::size_t k = 0;
            while (k < dpick.size()) {
                if (++dpick[k] < dur_options[k].size()) break;
                dpick[k] = 0;
                ++k;
            }
            if (k == dpick.size()) break;
        }
    }

    bool try_durations(const std::vector<Route>& routes, const std::vector<int>& deficient,
                       const std::vector<std::vector<std::vector<Placement>>>& placements,
                       const std::vector<std::size_t>& pick,
                       const std::vector<std::vector<std::vector<double>>>& dur_options,
                       const std::vector<std::size_t>& dpick, double obj) {
        std::vector<FreeChargeEvent> events;
        for (std::size_t d = 0; d < deficient.size(); ++d) {
            const auto& pls = placements[d][pick[d]];
            const auto& durs = dur_options[d][dpick[d]];
            for (std::size_t i = 0; i < pls.size(); ++i) {
                FreeChargeEvent ev;
                ev.bus = routes[static_cast<std::size_t>(pls[i].route_index)].bus;
                ev.route_index = pls[i].route_index;
                ev.after_stop = pls[i].after_stop;
                ev.charger = pls[i].charger;
                ev.min_duration = durs[i];
                ev.max_duration = durs[i];
                events.push_back(ev);
            }
        }

        // orderings between events sharing a charger
        std::vector<std::vector<int>> shared(inst.chargers.size());
        for (std::size_t e = 0; e < events.size(); ++e)
            shared[static_cast<std::size_t>(events[e].charger)].push_back(static_cast<int>(e));
        std::vector<std::vector<std::pair<int, int>>> order_sets{{}};
        for (const auto& group : shared) {
            if (group.size() < 2) continue;
            std::vector<int> idx = group;
            std::sort(idx.begin(), idx.end());
            std::vector<std::vector<std::pair<int, int>>> expanded;
            do {
                std::vector<std::pair<int, int>> chain;
                for (std::size_t i = 1; i < idx.size(); ++i) chain.emplace_back(idx[i - 1], idx[i]);
                for (const auto& prefix : order_sets) {
                    auto combined = prefix;
                    combined.insert(combined.end(), chain.begin(), chain.end());
                    expanded.push_back(std::move(combined));
                }
            } while (std::next_permutation(idx.begin(), idx.end()));
            order_sets = std::move(expanded);
        }

        for (const auto& orderings : order_sets) {
            std::vector<FreeChargeEvent> evs = events;
            std::vector<std::vector<double>> assignment;
            if (!schedule_exists_with_events(inst, graph, routes, journeys_now, evs, orderings,
                                             &assignment))
                continue;
            record_with_events(routes, evs, assignment, obj);
            return true;
        }
        return false;
    }

    // ---- building the winning Solution ----

    void finish_schedule(Route& r, const std::vector<double>& bvals) {
        const Bus& bus = inst.buses[static_cast<std::size_t>(r.bus)];
        r.sched.resize(r.stops.size());
        int load = 0;
        for (std::size_t p = 0; p < r.stops.size(); ++p) {
            const Stop& s = r.stops[p];
            if (p == 0) {
                r.sched.B[0] = bvals[0];
                r.sched.A[0] = bvals[0];
                r.sched.D[0] = bvals[0];
            } else {
                const double t = bus_travel_time(stop_location(inst, graph, r.stops[p - 1]),
                                                 stop_location(inst, graph, s), bus.speed);
                r.sched.A[p] = r.sched.D[p - 1] + t;
                r.sched.B[p] = std::max(bvals[p], r.sched.A[p]);
                r.sched.W[p] = r.sched.B[p] - r.sched.A[p];
                const double stay = s.kind == StopKind::Charger ? s.charge_duration : 0.0;
                r.sched.D[p] = r.sched.B[p] + stop_service_time(inst, s) + stay;
            }
            if (s.kind == StopKind::Pickup) ++load;
            if (s.kind == StopKind::Dropoff) --load;
            if (s.kind == StopKind::Transit)
                load += static_cast<int>(s.board.size()) - static_cast<int>(s.alight.size());
            r.sched.q[p] = load;
            r.sched.rho[p] = 0.0;
        }
    }

    void record(const std::vector<Route>& routes, const std::vector<FreeChargeEvent>& events,
                const std::vector<std::vector<double>>& assignment, double obj) {
        Solution sol = make_empty_solution(inst);
        for (std::size_t ri = 0; ri < routes.size(); ++ri) {
            Route r = routes[ri];
            finish_schedule(r, assignment[ri]);
            sol.routes[static_cast<std::size_t>(r.bus)] = std::move(r);
        }
        for (const auto& ev : events)
            sol.calendars[static_cast<std::size_t>(ev.charger)].insert(
                {ev.bus, ev.booked_start, ev.booked_start + ev.booked_duration});
        for (int r = 0; r < inst.n(); ++r)
            sol.journeys[static_cast<std::size_t>(r)] = journeys_now[static_cast<std::size_t>(r)];
        for (const auto& r : sol.routes)
            if (r.used()) refresh_route_journeys(inst, graph, sol, r.bus);
        sol.objective_cache = compute_objective(inst, graph, sol);
        if (sol.objective_cache < best_obj - 1e-9) {
            best_obj = sol.objective_cache;
            best = std::move(sol);
            found = true;
        }
        (void)obj;
    }

    void record_with_events(const std::vector<Route>& routes,
                            const std::vector<FreeChargeEvent>& events,
                            const std::vector<std::vector<double>>& assignment, double obj) {
        // splice the booked events into their routes, then build schedules
        std::vector<Route> final_routes = routes;
        std::vector<std::vector<double>> final_assign = assignment;
        // group events per route, splice from the back
        std::vector<std::vector<const FreeChargeEvent*>> per_route(routes.size());
        for (const auto& ev : events)
            per_route[static_cast<std::size_t>(ev.route_index)].push_back(&ev);
        for (std::size_t ri = 0; ri < per_route.size(); ++ri) {
            auto evs = per_route[ri];
            std::sort(evs.begin(), evs.end(), [](const FreeChargeEvent* a, const FreeChargeEvent* b) {
                return a->after_stop > b->after_stop;
            });
            for (const auto* ev : evs) {
                Stop s;
                s.kind = StopKind::Charger;
                s.ref = ev->charger;
                s.charge_start = ev->booked_start;
                s.charge_duration = ev->booked_duration;
                final_routes[ri].stops.insert(final_routes[ri].stops.begin() + ev->after_stop + 1,
                                              s);
                final_assign[ri].insert(final_assign[ri].begin() + ev->after_stop + 1,
                                        ev->booked_start - inst.params.charge_service_time);
            }
        }
        record(final_routes, events, final_assign, obj);
    }
};

}  // namespace

bool brute_force_guard_ok(const Instance& inst, const ExpandedTransitGraph& graph) {
    return inst.n() <= 4 && inst.buses.size() <= 2 && graph.nodes.size() <= 12;
}

ExactResult brute_force_solve(const Instance& inst, const ExpandedTransitGraph& graph) {
    if (!brute_force_guard_ok(inst, graph))
        throw std::runtime_error(
            "brute_force_solve refuses: instance beyond n<=4, buses<=2, transit nodes<=12");
    Enumerator en{inst, graph};
    en.make_patterns();
    en.prepare_suffix_bounds();
    en.chosen.resize(static_cast<std::size_t>(inst.n()));
    en.chosen_lb.assign(static_cast<std::size_t>(inst.n()), 0.0);
    en.best = make_empty_solution(inst);
    en.best.objective_cache = compute_objective(inst, graph, en.best);
    en.best_obj = en.best.objective_cache + 1e-6;  // all-reject is always available
    if (inst.n() == 0) {
        ExactResult res;
        res.solved = true;
        res.best = en.best;
        return res;
    }
    en.assign(0, 0.0);
    ExactResult res;
    res.solved = true;
    res.best = std::move(en.best);
    return res;
}

}  // namespace eidarp
