#include "eidarp/insertion.hpp"

#include <algorithm>
#include <limits>

#include "eidarp/charging.hpp"
#include "eidarp/feasibility.hpp"

namespace eidarp {

namespace {

struct RouteEval {
    bool ok = false;
    Route route;
    std::map<int, Route> delayed;
    bool cal_touched = false;
    std::vector<ChargerCalendar> cal;
};

// Evaluate one edited route: nine-step schedule, then charging repair if the
// route became energy-infeasible. Candidate state stays local until applied.
RouteEval eval_route(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol,
                     Route candidate, const Journey& pending,
                     const std::map<int, Route>& other_overrides, bool cal_touched_in,
                     const std::vector<ChargerCalendar>& cal_in) {
    RouteEval ev;
    ev.cal_touched = cal_touched_in;
    ev.cal = cal_in;

    // Route edits invalidate previous charging bookings of this bus.
    bool had_chargers = false;
    for (auto it = candidate.stops.begin(); it != candidate.stops.end();) {
        if (it->kind == StopKind::Charger) {
            had_chargers = true;
            it = candidate.stops.erase(it);
        } else {
            ++it;
        }
    }
    if (had_chargers) {
        ev.cal_touched = true;
        for (auto& c : ev.cal) c.release(candidate.bus);
    }

    EvalContext ctx(inst, graph, sol);
    ctx.journey_overrides[pending.request] = &pending;
    for (const auto& [bus, rt] : other_overrides) ctx.route_overrides[bus] = &rt;

    if (!nine_step_evaluate(candidate, ctx, &ev.delayed).feasible) return ev;

    const EnergyPass ep = energy_pass(inst, graph, candidate);
    if (ep.delta_e > kEpsEnergy) {
        if (!ev.cal_touched) {
            ev.cal_touched = true;
            for (auto& c : ev.cal) c.release(candidate.bus);
        }
        const ChargingOutcome oc = schedule_recharges(candidate, ctx, ev.cal);
        if (!oc.success) return ev;
    }
    ev.ok = true;
    ev.route = std::move(candidate);
    return ev;
}

std::vector<Stop> splice_one(const std::vector<Stop>& base, int pos, const Stop& s) {
    std::vector<Stop> out;
    out.reserve(base.size() + 1);
    for (int p = 0; p <= static_cast<int>(base.size()); ++p) {
        if (p == pos) out.push_back(s);
        if (p < static_cast<int>(base.size())) out.push_back(base[static_cast<std::size_t>(p)]);
    }
    return out;
}

Stop make_stop(StopKind kind, int ref) {
    Stop s;
    s.kind = kind;
    s.ref = ref;
    return s;
}

// Buses worth trying: all used routes plus one representative empty bus per
// (type, depots) class; the rest are symmetric.
std::vector<int> candidate_buses(const Instance& inst, const Solution& sol,
                                 const std::map<int, Route>& overrides) {
    std::vector<int> out;
    std::vector<std::tuple<int, int, int>> seen_empty;
    for (int k = 0; k < static_cast<int>(inst.buses.size()); ++k) {
        auto it = overrides.find(k);
        const Route& r = it != overrides.end() ? it->second : sol.routes[static_cast<std::size_t>(k)];
        if (r.used()) {
            out.push_back(k);
            continue;
        }
        const Bus& b = inst.buses[static_cast<std::size_t>(k)];
        const std::tuple<int, int, int> key{b.type_id, b.origin_depot, b.dest_depot};
        if (std::find(seen_empty.begin(), seen_empty.end(), key) == seen_empty.end()) {
            seen_empty.push_back(key);
            out.push_back(k);
        }
    }
    return out;
}

const Route& base_route(const Solution& sol, const std::map<int, Route>& overrides, int bus) {
    auto it = overrides.find(bus);
    return it != overrides.end() ? it->second : sol.routes[static_cast<std::size_t>(bus)];
}

struct Collector {
    double best_delta = std::numeric_limits<double>::infinity();
    InsertionPlan best;
    int k_costs = 1;
    std::vector<double> costs;

    void offer(double delta, InsertionPlan&& plan) {
        costs.push_back(delta);
        std::sort(costs.begin(), costs.end());
        if (static_cast<int>(costs.size()) > k_costs) costs.resize(static_cast<std::size_t>(k_costs));
        if (delta < best_delta - 1e-12) {
            best_delta = delta;
            best = std::move(plan);
        }
    }
};

double plan_delta(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol,
                  const InsertionPlan& plan) {
    double delta = -inst.params.omega;
    std::vector<int> affected;
    for (const auto& [bus, rt] : plan.routes) {
        delta += inst.params.lambda1 *
                 (route_travel_time(inst, graph, rt) -
                  route_travel_time(inst, graph, sol.routes[static_cast<std::size_t>(bus)]));
        for (const auto& j : sol.journeys) {
            if (!j.served()) continue;
            const bool on_bus = (j.first_mode == LegMode::Bus && j.first_bus == bus) ||
                                (j.last_mode == LegMode::Bus && j.last_bus == bus);
            if (on_bus && std::find(affected.begin(), affected.end(), j.request) == affected.end())
                affected.push_back(j.request);
        }
    }
    for (int r : affected) {
        const Journey& j = sol.journeys[static_cast<std::size_t>(r)];
        delta += inst.params.lambda2 *
                 (journey_lbar_against(inst, graph, sol, plan.routes, j) - j.lbar());
    }
    delta += inst.params.lambda2 * journey_lbar_against(inst, graph, sol, plan.routes, plan.journey);
    return delta;
}

}  // namespace

double journey_lbar_against(const Instance& inst, const ExpandedTransitGraph& graph,
                            const Solution& sol, const std::map<int, Route>& overrides,
                            const Journey& j) {
    if (!j.served()) return 0.0;
    const auto& req = inst.requests[static_cast<std::size_t>(j.request)];
    double lbar = 0.0;
    if (j.option == 5) {
        const Route& r = base_route(sol, overrides, j.first_bus);
        return onboard_time(inst, graph, r, r.find_stop(StopKind::Pickup, j.request),
                            r.find_stop(StopKind::Dropoff, j.request));
    }
    const auto& tp = graph.tps[static_cast<std::size_t>(j.tp)];
    lbar += tp.travel_time;
    if (j.first_mode == LegMode::Walk) {
        lbar += walk_time_or_reject(req.origin, graph.node(tp.entry).location, inst.params);
    } else {
        const Route& r = base_route(sol, overrides, j.first_bus);
        lbar += onboard_time(inst, graph, r, r.find_stop(StopKind::Pickup, j.request),
                             r.find_transit_stop_with_alight(j.request));
    }
    if (j.last_mode == LegMode::Walk) {
        lbar += walk_time_or_reject(graph.node(tp.exit).location, req.destination, inst.params);
    } else if (j.last_inserted) {
        const Route& r = base_route(sol, overrides, j.last_bus);
        lbar += onboard_time(inst, graph, r, r.find_transit_stop_with_board(j.request),
                             r.find_stop(StopKind::Dropoff, j.request));
    }
    return lbar;
}

InsertionResult find_best_insertion(const Instance& inst, const ExpandedTransitGraph& graph,
                                    const Solution& sol, const InsertionQuery& query) {
    const int rid = query.request;
    const Request& req = inst.requests[static_cast<std::size_t>(rid)];
    Collector col;
    col.k_costs = std::max(1, query.k_costs);

    auto allowed = [&](int option) {
        return query.force_option == 0 || query.force_option == option;
    };

    auto finish_plan = [&](InsertionPlan&& plan) {
        plan.feasible = true;
        plan.delta_cost = plan_delta(inst, graph, sol, plan);
        col.offer(plan.delta_cost, std::move(plan));
    };

    auto pack_single_route = [&](Journey journey, int bus, RouteEval&& ev) {
        InsertionPlan plan;
        plan.journey = std::move(journey);
        for (auto& [b2, rt] : ev.delayed)
            if (b2 != bus) plan.routes[b2] = std::move(rt);
        plan.routes[bus] = std::move(ev.route);
        plan.cal_touched = ev.cal_touched;
        if (ev.cal_touched) plan.calendars = std::move(ev.cal);
        finish_plan(std::move(plan));
    };

    // ---- option 5: door-to-door bus ----
    if (allowed(5) && !req.bus_window_empty) {
        for (int bus : candidate_buses(inst, sol, {})) {
            const Route& base = sol.routes[static_cast<std::size_t>(bus)];
            const int len = static_cast<int>(base.stops.size());
            for (int i = 1; i < len; ++i) {
                for (int jpos = i; jpos < len; ++jpos) {
                    Route cand = base;
                    cand.stops = splice_one(cand.stops, i, make_stop(StopKind::Pickup, rid));
                    cand.stops = splice_one(cand.stops, jpos + 1, make_stop(StopKind::Dropoff, rid));
                    Journey pending;
                    pending.request = rid;
                    pending.option = 5;
                    pending.first_mode = LegMode::Bus;
                    pending.first_bus = bus;
                    RouteEval ev =
                        eval_route(inst, graph, sol, std::move(cand), pending, {}, false,
                                   sol.calendars);
                    if (!ev.ok) continue;
                    pack_single_route(pending, bus, std::move(ev));
                }
            }
        }
    }

    // ---- options 1-4: journeys with a transit leg ----
    for (const auto& ctp : graph.per_customer[static_cast<std::size_t>(rid)]) {
        if (query.force_tp >= 0 && ctp.tp != query.force_tp) continue;
        const auto& tp = graph.tps[static_cast<std::size_t>(ctp.tp)];
        const auto& entry = graph.node(tp.entry);
        const auto& exit = graph.node(tp.exit);
        const double walk_in = walk_time_or_reject(req.origin, entry.location, inst.params);
        const double walk_out = walk_time_or_reject(exit.location, req.destination, inst.params);

        // Exact walk-leg windows (the candidate flags are a superset).
        const bool walk_in_ok = walk_in >= 0.0 &&
                                entry.theta_dep - walk_in >= req.otw().e - kEpsTime &&
                                entry.theta_dep - walk_in <= req.otw().l + kEpsTime;
        const bool walk_out_ok = walk_out >= 0.0 &&
                                 exit.theta_arr + walk_out >= req.dtw().e - kEpsTime &&
                                 exit.theta_arr + walk_out <= req.dtw().l + kEpsTime;

        // Option 1: walk + transit + walk, no bus involved.
        if (allowed(1) && (ctp.options & kOpt1) && walk_in_ok && walk_out_ok) {
            const double dep = entry.theta_dep - walk_in;
            const double arr = exit.theta_arr + walk_out;
            if (arr - dep <= req.max_travel_time + kEpsTime) {
                InsertionPlan plan;
                Journey& j = plan.journey;
                j.request = rid;
                j.option = 1;
                j.tp = ctp.tp;
                j.first_mode = LegMode::Walk;
                j.last_mode = LegMode::Walk;
                j.first_time = walk_in;
                j.transit_time = tp.travel_time;
                j.last_time = walk_out;
                j.walk_time = walk_in + walk_out;
                j.dep = dep;
                j.arr = arr;
                finish_plan(std::move(plan));
            }
        }

        // First-mile bus placements shared by options 2 and 4: pickup plus a
        // drop at the entry node, either a fresh stop or merged into an
        // existing visit of the same transit node.
        auto first_mile_candidates = [&](auto&& consume) {
            for (int bus : candidate_buses(inst, sol, {})) {
                const Route& base = sol.routes[static_cast<std::size_t>(bus)];
                const int len = static_cast<int>(base.stops.size());
                const int merge = base.find_stop(StopKind::Transit, tp.entry);
                for (int i = 1; i < len; ++i) {
                    for (int spos = i; spos < len; ++spos) {
                        Route cand = base;
                        cand.stops = splice_one(cand.stops, i, make_stop(StopKind::Pickup, rid));
                        Stop st = make_stop(StopKind::Transit, tp.entry);
                        st.alight.push_back(rid);
                        cand.stops = splice_one(cand.stops, spos + 1, st);
                        consume(bus, std::move(cand));
                    }
                    if (merge >= i) {
                        Route cand = base;
                        cand.stops = splice_one(cand.stops, i, make_stop(StopKind::Pickup, rid));
                        cand.stops[static_cast<std::size_t>(merge + 1)].alight.push_back(rid);
                        consume(bus, std::move(cand));
                    }
                }
            }
        };

        // Last-mile bus placements shared by options 3 and 4, against a set of
        // pending route overrides.
        auto last_mile_candidates = [&](const std::map<int, Route>& overrides, auto&& consume) {
            for (int bus : candidate_buses(inst, sol, overrides)) {
                const Route& base = base_route(sol, overrides, bus);
                const int len = static_cast<int>(base.stops.size());
                const int merge = base.find_stop(StopKind::Transit, tp.exit);
                for (int g = 1; g < len; ++g) {
                    for (int jpos = g; jpos < len; ++jpos) {
                        Route cand = base;
                        Stop st = make_stop(StopKind::Transit, tp.exit);
                        st.board.push_back(rid);
                        cand.stops = splice_one(cand.stops, g, st);
                        cand.stops =
                            splice_one(cand.stops, jpos + 1, make_stop(StopKind::Dropoff, rid));
                        consume(bus, std::move(cand));
                    }
                }
                if (merge >= 1) {
                    for (int jpos = merge; jpos < len; ++jpos) {
                        Route cand = base;
                        cand.stops[static_cast<std::size_t>(merge)].board.push_back(rid);
                        cand.stops =
                            splice_one(cand.stops, jpos + 1, make_stop(StopKind::Dropoff, rid));
                        consume(bus, std::move(cand));
                    }
                }
            }
        };

        // Option 2: bus + transit + walk.
        if (allowed(2) && (ctp.options & kOpt2) && walk_out_ok) {
            first_mile_candidates([&](int bus, Route cand) {
                Journey p2;
                p2.request = rid;
                p2.option = 2;
                p2.tp = ctp.tp;
                p2.first_mode = LegMode::Bus;
                p2.last_mode = LegMode::Walk;
                p2.first_bus = bus;
                p2.transit_time = tp.travel_time;
                p2.last_time = walk_out;
                p2.walk_time = walk_out;
                p2.arr = exit.theta_arr + walk_out;
                RouteEval ev =
                    eval_route(inst, graph, sol, std::move(cand), p2, {}, false, sol.calendars);
                if (!ev.ok) return;
                pack_single_route(p2, bus, std::move(ev));
            });
        }

        // Option 3: walk + transit + bus.
        if (allowed(3) && (ctp.options & kOpt3) && walk_in_ok) {
            last_mile_candidates({}, [&](int bus, Route cand) {
                Journey p2;
                p2.request = rid;
                p2.option = 3;
                p2.tp = ctp.tp;
                p2.first_mode = LegMode::Walk;
                p2.last_mode = LegMode::Bus;
                p2.last_bus = bus;
                p2.first_time = walk_in;
                p2.walk_time = walk_in;
                p2.transit_time = tp.travel_time;
                p2.dep = entry.theta_dep - walk_in;
                RouteEval ev =
                    eval_route(inst, graph, sol, std::move(cand), p2, {}, false, sol.calendars);
                if (!ev.ok) return;
                pack_single_route(p2, bus, std::move(ev));
            });
        }

        // Option 4: bus + transit + bus. The first mile is inserted first; its
        // best feasible placement is then completed by the best last mile.
        if (allowed(4) && (ctp.options & kOpt4)) {
            Journey pending;
            pending.request = rid;
            pending.option = 4;
            pending.tp = ctp.tp;
            pending.first_mode = LegMode::Bus;
            pending.last_mode = LegMode::Bus;
            pending.transit_time = tp.travel_time;
            pending.last_inserted = false;

            bool have_first = false;
            double best_first_delta = std::numeric_limits<double>::infinity();
            RouteEval best_first;
            int best_first_bus = -1;
            first_mile_candidates([&](int bus, Route cand) {
                Journey p2 = pending;
                p2.first_bus = bus;
                RouteEval ev =
                    eval_route(inst, graph, sol, std::move(cand), p2, {}, false, sol.calendars);
                if (!ev.ok) return;
                InsertionPlan probe;
                probe.journey = p2;
                probe.routes[bus] = ev.route;
                for (const auto& [b2, rt] : ev.delayed)
                    if (b2 != bus) probe.routes[b2] = rt;
                const double d = plan_delta(inst, graph, sol, probe);
                if (d < best_first_delta - 1e-12) {
                    best_first_delta = d;
                    best_first = std::move(ev);
                    best_first_bus = bus;
                    have_first = true;
                }
            });

            if (have_first) {
                std::map<int, Route> overrides;
                overrides[best_first_bus] = best_first.route;
                for (const auto& [b2, rt] : best_first.delayed)
                    if (b2 != best_first_bus) overrides[b2] = rt;

                last_mile_candidates(overrides, [&](int bus, Route cand) {
                    Journey p2 = pending;
                    p2.first_bus = best_first_bus;
                    p2.last_bus = bus;
                    p2.last_inserted = true;
                    RouteEval ev = eval_route(
                        inst, graph, sol, std::move(cand), p2, overrides, best_first.cal_touched,
                        best_first.cal_touched ? best_first.cal : sol.calendars);
                    if (!ev.ok) return;
                    InsertionPlan plan;
                    plan.journey = p2;
                    for (const auto& [b2, rt] : overrides)
                        if (b2 != bus) plan.routes[b2] = rt;
                    for (auto& [b2, rt] : ev.delayed)
                        if (b2 != bus) plan.routes[b2] = std::move(rt);
                    plan.routes[bus] = std::move(ev.route);
                    plan.cal_touched = best_first.cal_touched || ev.cal_touched;
                    if (ev.cal_touched)
                        plan.calendars = std::move(ev.cal);
                    else if (best_first.cal_touched)
                        plan.calendars = best_first.cal;
                    finish_plan(std::move(plan));
                });
            }
        }
    }

    InsertionResult out;
    out.best = std::move(col.best);
    out.costs = std::move(col.costs);
    return out;
}

void apply_insertion(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                     const InsertionPlan& plan) {
    for (const auto& [bus, rt] : plan.routes) sol.routes[static_cast<std::size_t>(bus)] = rt;
    if (plan.cal_touched) sol.calendars = plan.calendars;
    sol.journeys[static_cast<std::size_t>(plan.journey.request)] = plan.journey;
    for (const auto& [bus, rt] : plan.routes) refresh_route_journeys(inst, graph, sol, bus);
    sol.objective_cache = compute_objective(inst, graph, sol);
}

}  // namespace eidarp
