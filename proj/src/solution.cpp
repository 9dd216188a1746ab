#include "eidarp/solution.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace eidarp {

int Route::find_stop(StopKind kind, int ref) const {
    for (std::size_t i = 0; i < stops.size(); ++i)
        if (stops[i].kind == kind && stops[i].ref == ref) return static_cast<int>(i);
    return -1;
}

int Route::find_transit_stop_with_alight(int request) const {
    for (std::size_t i = 0; i < stops.size(); ++i)
        if (stops[i].kind == StopKind::Transit)
            for (int r : stops[i].alight)
                if (r == request) return static_cast<int>(i);
    return -1;
}

int Route::find_transit_stop_with_board(int request) const {
    for (std::size_t i = 0; i < stops.size(); ++i)
        if (stops[i].kind == StopKind::Transit)
            for (int r : stops[i].board)
                if (r == request) return static_cast<int>(i);
    return -1;
}

Route empty_route(const Instance& inst, int bus) {
    Route r;
    r.bus = bus;
    Stop start;
    start.kind = StopKind::DepotStart;
    start.ref = inst.buses[static_cast<std::size_t>(bus)].origin_depot;
    Stop end;
    end.kind = StopKind::DepotEnd;
    end.ref = inst.buses[static_cast<std::size_t>(bus)].dest_depot;
    r.stops = {start, end};
    return r;
}

void ChargerCalendar::insert(const Reservation& r) {
    auto it = std::lower_bound(reserved.begin(), reserved.end(), r,
                               [](const Reservation& a, const Reservation& b) { return a.start < b.start; });
    reserved.insert(it, r);
}

void ChargerCalendar::release(int bus) {
    reserved.erase(std::remove_if(reserved.begin(), reserved.end(),
                                  [bus](const Reservation& r) { return r.bus == bus; }),
                   reserved.end());
}

std::vector<std::pair<double, double>> ChargerCalendar::vacant() const {
    std::vector<std::pair<double, double>> gaps;
    double t = 0.0;
    for (const auto& r : reserved) {
        if (r.start > t + kEpsTime) gaps.emplace_back(t, r.start);
        t = std::max(t, r.end);
    }
    gaps.emplace_back(t, std::numeric_limits<double>::infinity());
    return gaps;
}

bool ChargerCalendar::overlaps(double start, double end) const {
    for (const auto& r : reserved)
        if (start < r.end - kEpsTime && r.start < end - kEpsTime) return true;
    return false;
}

std::vector<int> Solution::rejected() const {
    std::vector<int> out;
    for (const auto& j : journeys)
        if (!j.served()) out.push_back(j.request);
    return out;
}

std::vector<int> Solution::served() const {
    std::vector<int> out;
    for (const auto& j : journeys)
        if (j.served()) out.push_back(j.request);
    return out;
}

int Solution::n_rejected() const {
    int c = 0;
    for (const auto& j : journeys)
        if (!j.served()) ++c;
    return c;
}

Solution make_empty_solution(const Instance& inst) {
    Solution s;
    for (int k = 0; k < static_cast<int>(inst.buses.size()); ++k)
        s.routes.push_back(empty_route(inst, k));
    s.journeys.resize(inst.requests.size());
    for (int r = 0; r < inst.n(); ++r) s.journeys[static_cast<std::size_t>(r)].request = r;
    s.calendars.resize(inst.chargers.size());
    s.objective_cache = inst.params.omega * inst.n();
    return s;
}

Point stop_location(const Instance& inst, const ExpandedTransitGraph& graph, const Stop& s) {
    switch (s.kind) {
        case StopKind::DepotStart:
        case StopKind::DepotEnd:
            return inst.depots[static_cast<std::size_t>(s.ref)];
        case StopKind::Pickup:
            return inst.requests[static_cast<std::size_t>(s.ref)].origin;
        case StopKind::Dropoff:
            return inst.requests[static_cast<std::size_t>(s.ref)].destination;
        case StopKind::Transit:
            return graph.node(s.ref).location;
        case StopKind::Charger:
            return inst.chargers[static_cast<std::size_t>(s.ref)].location;
    }
    return {};
}

double stop_service_time(const Instance& inst, const Stop& s) {
    switch (s.kind) {
        case StopKind::Pickup:
        case StopKind::Dropoff:
        case StopKind::Transit:
            return inst.params.service_time;
        case StopKind::Charger:
            return inst.params.charge_service_time;
        default:
            return 0.0;
    }
}

namespace {

double arc_time(const Instance& inst, const ExpandedTransitGraph& graph, const Route& r,
                std::size_t from, std::size_t to) {
    const double speed = inst.buses[static_cast<std::size_t>(r.bus)].speed;
    return bus_travel_time(stop_location(inst, graph, r.stops[from]),
                           stop_location(inst, graph, r.stops[to]), speed);
}

}  // namespace

double route_travel_time(const Instance& inst, const ExpandedTransitGraph& graph, const Route& r) {
    if (!r.used()) return 0.0;
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < r.stops.size(); ++p) total += arc_time(inst, graph, r, p, p + 1);
    return total;
}

double onboard_time(const Instance& inst, const ExpandedTransitGraph& graph, const Route& r,
                    int from_stop, int to_stop) {
    double total = 0.0;
    for (int p = from_stop; p < to_stop; ++p)
        total += arc_time(inst, graph, r, static_cast<std::size_t>(p), static_cast<std::size_t>(p + 1));
    return total;
}

double compute_objective(const Instance& inst, const ExpandedTransitGraph& graph,
                         const Solution& sol) {
    double obj = 0.0;
    for (const auto& r : sol.routes) obj += inst.params.lambda1 * route_travel_time(inst, graph, r);
    for (const auto& j : sol.journeys) {
        if (j.served())
            obj += inst.params.lambda2 * j.lbar();
        else
            obj += inst.params.omega;
    }
    return obj;
}

void refresh_route_journeys(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                            int bus) {
    const Route& route = sol.routes[static_cast<std::size_t>(bus)];
    for (std::size_t p = 0; p < route.stops.size(); ++p) {
        const Stop& s = route.stops[p];
        if (s.kind == StopKind::Pickup) {
            Journey& j = sol.journeys[static_cast<std::size_t>(s.ref)];
            j.dep = route.sched.B[p];
            if (j.option == 5) {
                const int d = route.find_stop(StopKind::Dropoff, s.ref);
                j.first_time = onboard_time(inst, graph, route, static_cast<int>(p), d);
                j.arr = route.sched.B[static_cast<std::size_t>(d)];
            } else {
                // first mile by bus: ride up to the entry transit stop
                const int g = route.find_transit_stop_with_alight(s.ref);
                j.first_time = onboard_time(inst, graph, route, static_cast<int>(p), g);
            }
        } else if (s.kind == StopKind::Dropoff && sol.journeys[static_cast<std::size_t>(s.ref)].option != 5) {
            Journey& j = sol.journeys[static_cast<std::size_t>(s.ref)];
            const int g = route.find_transit_stop_with_board(s.ref);
            j.last_time = onboard_time(inst, graph, route, g, static_cast<int>(p));
            j.arr = route.sched.B[p];
        }
    }
}

double customer_wait_time(const Instance& inst, const ExpandedTransitGraph& graph,
                          const Solution& sol, int request) {
    const Journey& j = sol.journeys[static_cast<std::size_t>(request)];
    if (!j.served()) return 0.0;
    double wt = 0.0;
    if (j.uses_transit()) {
        const auto& tp = graph.tps[static_cast<std::size_t>(j.tp)];
        if (j.first_mode == LegMode::Bus) {
            const Route& r = sol.routes[static_cast<std::size_t>(j.first_bus)];
            const int g = r.find_transit_stop_with_alight(request);
            if (g >= 0) wt += pos_part(graph.node(tp.entry).theta_dep - r.sched.A[static_cast<std::size_t>(g)]);
        }
        if (j.last_mode == LegMode::Bus) {
            const Route& r = sol.routes[static_cast<std::size_t>(j.last_bus)];
            const int g = r.find_transit_stop_with_board(request);
            if (g >= 0) wt += pos_part(r.sched.B[static_cast<std::size_t>(g)] - graph.node(tp.exit).theta_arr);
        }
    }
    if (j.first_mode == LegMode::Bus) {
        const Route& r = sol.routes[static_cast<std::size_t>(j.first_bus)];
        const int p = r.find_stop(StopKind::Pickup, request);
        if (p >= 0) {
            const auto& req = inst.requests[static_cast<std::size_t>(request)];
            const double ready = std::max(r.sched.A[static_cast<std::size_t>(p)], req.otw().e);
            wt += pos_part(r.sched.B[static_cast<std::size_t>(p)] - ready);
        }
    }
    return wt;
}

KpiReport compute_kpis(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol) {
    KpiReport k;
    for (const auto& r : sol.routes) {
        k.btt += route_travel_time(inst, graph, r);
        if (r.used()) ++k.n_used_buses;
        for (const auto& s : r.stops)
            if (s.kind == StopKind::Charger) k.rt += s.charge_duration;
    }
    int served = 0;
    for (const auto& j : sol.journeys) {
        if (!j.served()) {
            ++k.n_reject;
            continue;
        }
        ++served;
        k.ctt += j.lbar();
        k.ctt_transit += j.transit_time;
        k.ctt_bus += j.in_bus_time();
        k.ctt_walk += j.walk_time;
        k.wt += customer_wait_time(inst, graph, sol, j.request);
        if (j.uses_transit()) ++k.n_cus_transit;
        if (j.option == 4) ++k.n_to4;
    }
    if (served > 0) {
        k.ctt /= served;
        k.ctt_transit /= served;
        k.ctt_bus /= served;
        k.ctt_walk /= served;
        k.wt /= served;
    }
    k.cus_per_bus = k.n_used_buses > 0 ? static_cast<double>(served) / k.n_used_buses : 0.0;
    k.objective = sol.objective_cache;
    return k;
}

std::string kpi_csv_header() {
    return "objective,BTT,RT,CTT,CTT_transit,CTT_bus,CTT_walk,WT,n_cus_transit,n_used_buses,"
           "cus_per_bus,n_reject,n_TO4,runtime_s";
}

std::string kpi_csv_row(const KpiReport& k) {
    std::ostringstream os;
    os << k.objective << ',' << k.btt << ',' << k.rt << ',' << k.ctt << ',' << k.ctt_transit << ','
       << k.ctt_bus << ',' << k.ctt_walk << ',' << k.wt << ',' << k.n_cus_transit << ','
       << k.n_used_buses << ',' << k.cus_per_bus << ',' << k.n_reject << ',' << k.n_to4 << ','
       << k.runtime_s;
    return os.str();
}

}  // namespace eidarp
