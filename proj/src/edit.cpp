#include <algorithm>

#include "eidarp/charging.hpp"
#include "eidarp/feasibility.hpp"
#include "eidarp/solution.hpp"

namespace eidarp {

namespace {

void strip_customer_from_route(Route& route, int request) {
    for (auto& s : route.stops) {
        s.board.erase(std::remove(s.board.begin(), s.board.end(), request), s.board.end());
        s.alight.erase(std::remove(s.alight.begin(), s.alight.end(), request), s.alight.end());
    }
    route.stops.erase(std::remove_if(route.stops.begin(), route.stops.end(),
                                     [&](const Stop& s) {
                                         if (s.is_customer() && s.ref == request) return true;
                                         if (s.kind == StopKind::Transit && s.board.empty() &&
                                             s.alight.empty())
                                             return true;
                                         return false;
                                     }),
                      route.stops.end());
}

void strip_chargers(Route& route, std::vector<ChargerCalendar>& calendars) {
    bool had = false;
    for (const auto& s : route.stops)
        if (s.kind == StopKind::Charger) had = true;
    if (!had) return;
    route.stops.erase(std::remove_if(route.stops.begin(), route.stops.end(),
                                     [](const Stop& s) { return s.kind == StopKind::Charger; }),
                      route.stops.end());
    for (auto& c : calendars) c.release(route.bus);
}

std::vector<int> customers_on_route(const Route& route) {
    std::vector<int> out;
    auto add = [&](int r) {
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    };
    for (const auto& s : route.stops) {
        if (s.is_customer()) add(s.ref);
        for (int r : s.board) add(r);
        for (int r : s.alight) add(r);
    }
    return out;
}

// Re-schedule a route in place after an edit. A route that can no longer be
// scheduled (a removal can strip the detour that kept a transfer window
// reachable) is emptied into the unserved pool instead.
void reevaluate_route(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                      int bus, std::vector<int>& extra_unserved);

void remove_customer_inner(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                           int request, std::vector<int>& extra_unserved, bool reevaluate) {
    Journey j = sol.journeys[static_cast<std::size_t>(request)];
    if (!j.served()) return;

    Journey cleared;
    cleared.request = request;
    sol.journeys[static_cast<std::size_t>(request)] = cleared;

    std::vector<int> buses;
    if (j.first_mode == LegMode::Bus) buses.push_back(j.first_bus);
    if (j.last_mode == LegMode::Bus &&
        std::find(buses.begin(), buses.end(), j.last_bus) == buses.end())
        buses.push_back(j.last_bus);

    for (int bus : buses) {
        Route& route = sol.routes[static_cast<std::size_t>(bus)];
        strip_customer_from_route(route, request);
        strip_chargers(route, sol.calendars);
    }
    if (reevaluate)
        for (int bus : buses) reevaluate_route(inst, graph, sol, bus, extra_unserved);
}

void reevaluate_route(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                      int bus, std::vector<int>& extra_unserved) {
    Route& route = sol.routes[static_cast<std::size_t>(bus)];
    if (!route.used()) {
        route.sched.resize(route.stops.size());
        route.sched.f_delay = false;
        return;
    }
    EvalContext ctx(inst, graph, sol);
    std::map<int, Route> delayed;
    bool ok = nine_step_evaluate(route, ctx, &delayed).feasible;
    if (ok) {
        for (auto& [b2, rt] : delayed)
            if (b2 != bus) {
                sol.routes[static_cast<std::size_t>(b2)] = std::move(rt);
                refresh_route_journeys(inst, graph, sol, b2);
            }
        ok = schedule_recharges(route, ctx, sol.calendars).success;
    }
    if (!ok) {
        for (int r : customers_on_route(route))
            if (sol.journeys[static_cast<std::size_t>(r)].served()) {
                remove_customer_inner(inst, graph, sol, r, extra_unserved, true);
                extra_unserved.push_back(r);
            }
        return;
    }
    refresh_route_journeys(inst, graph, sol, bus);
}

}  // namespace

void remove_customer(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                     int request, std::vector<int>& extra_unserved) {
    remove_customer_inner(inst, graph, sol, request, extra_unserved, true);
    sol.objective_cache = compute_objective(inst, graph, sol);
}

}  // namespace eidarp
