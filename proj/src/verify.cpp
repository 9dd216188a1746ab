#include "eidarp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace eidarp {

namespace {

// Loose tolerance for schedule self-consistency of a reported solution.
constexpr double kTol = 1e-6;

struct Checker {
    const Instance& inst;
    const ExpandedTransitGraph& graph;
    const Solution& sol;
    VerifyReport report;

    void add(const std::string& code, const std::string& msg) {
        report.violations.push_back({code, msg});
    }

    double walk_time(const Point& a, const Point& b) const {
        return distance_km(a, b) / inst.params.walk_speed;
    }
    bool walk_ok(const Point& a, const Point& b) const {
        return distance_km(a, b) <= inst.params.max_walk_dist + 1e-9;
    }

    // Customer departure/arrival recomputed from schedules and timetables.
    bool recompute_dep(const Journey& j, double& out) const {
        const auto& req = inst.requests[static_cast<std::size_t>(j.request)];
        if (j.first_mode == LegMode::Walk) {
            const auto& entry = graph.node(graph.tps[static_cast<std::size_t>(j.tp)].entry);
            out = entry.theta_dep - walk_time(req.origin, entry.location);
            return true;
        }
        const Route& r = sol.routes[static_cast<std::size_t>(j.first_bus)];
        const int p = r.find_stop(StopKind::Pickup, j.request);
        if (p < 0) return false;
        out = r.sched.B[static_cast<std::size_t>(p)];
        return true;
    }
    bool recompute_arr(const Journey& j, double& out) const {
        const auto& req = inst.requests[static_cast<std::size_t>(j.request)];
        if (j.option == 5) {
            const Route& r = sol.routes[static_cast<std::size_t>(j.first_bus)];
            const int p = r.find_stop(StopKind::Dropoff, j.request);
            if (p < 0) return false;
            out = r.sched.B[static_cast<std::size_t>(p)];
            return true;
        }
        if (j.last_mode == LegMode::Walk) {
            const auto& exit = graph.node(graph.tps[static_cast<std::size_t>(j.tp)].exit);
            out = exit.theta_arr + walk_time(exit.location, req.destination);
            return true;
        }
        const Route& r = sol.routes[static_cast<std::size_t>(j.last_bus)];
        const int p = r.find_stop(StopKind::Dropoff, j.request);
        if (p < 0) return false;
        out = r.sched.B[static_cast<std::size_t>(p)];
        return true;
    }

    void check_structure() {
        // Count every appearance of each request across all routes.
        std::map<int, int> pickups, dropoffs, alights, boards;
        for (const auto& r : sol.routes) {
            for (const auto& s : r.stops) {
                if (s.kind == StopKind::Pickup) pickups[s.ref]++;
                if (s.kind == StopKind::Dropoff) dropoffs[s.ref]++;
                for (int id : s.alight) alights[id]++;
                for (int id : s.board) boards[id]++;
            }
        }
        for (const auto& j : sol.journeys) {
            const int id = j.request;
            const int np = pickups.count(id) ? pickups[id] : 0;
            const int nd = dropoffs.count(id) ? dropoffs[id] : 0;
            const int na = alights.count(id) ? alights[id] : 0;
            const int nb = boards.count(id) ? boards[id] : 0;
            if (!j.served()) {
                if (np || nd || na || nb)
                    add("pairing", "rejected request " + std::to_string(id) + " appears on a route");
                continue;
            }
            int ep = 0, ed = 0, ea = 0, eb = 0;
            switch (j.option) {
                case 1: break;
                case 2: ep = 1; ea = 1; break;
                case 3: ed = 1; eb = 1; break;
                case 4: ep = 1; ea = 1; ed = 1; eb = 1; break;
                case 5: ep = 1; ed = 1; break;
            }
            if (np != ep || nd != ed || na != ea || nb != eb) {
                add("pairing", "request " + std::to_string(id) + " option " +
                                   std::to_string(j.option) + " has inconsistent stops/labels");
                continue;
            }
            if (j.option == 5) {
                const Route& r = sol.routes[static_cast<std::size_t>(j.first_bus)];
                const int p = r.find_stop(StopKind::Pickup, id);
                const int d = r.find_stop(StopKind::Dropoff, id);
                if (p < 0 || d < 0)
                    add("same-bus", "request " + std::to_string(id) +
                                        " origin/destination not on the stated bus");
                else if (p >= d)
                    add("pairing", "request " + std::to_string(id) + " pickup after dropoff");
            }
            if (j.uses_transit()) {
                if (j.tp < 0 || j.tp >= static_cast<int>(graph.tps.size())) {
                    add("transit-leg", "request " + std::to_string(id) + " has no valid transit pair");
                    continue;
                }
                const auto& tp = graph.tps[static_cast<std::size_t>(j.tp)];
                if (j.first_mode == LegMode::Bus) {
                    const Route& r = sol.routes[static_cast<std::size_t>(j.first_bus)];
                    const int p = r.find_stop(StopKind::Pickup, id);
                    const int g = r.find_transit_stop_with_alight(id);
                    if (p < 0 || g < 0 || p >= g)
                        add("pairing", "request " + std::to_string(id) + " first mile malformed");
                    else if (r.stops[static_cast<std::size_t>(g)].ref != tp.entry)
                        add("transit-leg", "request " + std::to_string(id) +
                                               " first mile ends at the wrong transit node");
                } else {
                    const auto& entry = graph.node(tp.entry);
                    const auto& req = inst.requests[static_cast<std::size_t>(id)];
                    if (!walk_ok(req.origin, entry.location))
                        add("walk-window", "request " + std::to_string(id) +
                                               " walks beyond the maximum distance (origin)");
                }
                if (j.last_mode == LegMode::Bus) {
                    const Route& r = sol.routes[static_cast<std::size_t>(j.last_bus)];
                    const int g = r.find_transit_stop_with_board(id);
                    const int d = r.find_stop(StopKind::Dropoff, id);
                    if (g < 0 || d < 0 || g >= d)
                        add("pairing", "request " + std::to_string(id) + " last mile malformed");
                    else if (r.stops[static_cast<std::size_t>(g)].ref != tp.exit)
                        add("transit-leg", "request " + std::to_string(id) +
                                               " last mile starts at the wrong transit node");
                } else {
                    const auto& exit = graph.node(tp.exit);
                    const auto& req = inst.requests[static_cast<std::size_t>(id)];
                    if (!walk_ok(exit.location, req.destination))
                        add("walk-window", "request " + std::to_string(id) +
                                               " walks beyond the maximum distance (destination)");
                }
            }
        }
    }

    void check_routes() {
        for (const auto& r : sol.routes) {
            const Bus& bus = inst.buses[static_cast<std::size_t>(r.bus)];
            const std::string tag = "bus " + std::to_string(r.bus);
            if (r.stops.size() < 2 ||
                r.stops.front().kind != StopKind::DepotStart ||
                r.stops.back().kind != StopKind::DepotEnd) {
                add("depot", tag + ": route must start and end at depots");
                continue;
            }
            if (r.stops.front().ref != bus.origin_depot || r.stops.back().ref != bus.dest_depot)
                add("depot", tag + ": wrong origin or destination depot");
            for (std::size_t p = 1; p + 1 < r.stops.size(); ++p)
                if (r.stops[p].kind == StopKind::DepotStart || r.stops[p].kind == StopKind::DepotEnd)
                    add("depot", tag + ": depot visited mid-route");
            if (!r.used()) continue;
            if (r.sched.A.size() != r.stops.size()) {
                add("schedule", tag + ": missing schedule");
                continue;
            }

            int q = 0;
            double soc = bus.e_init;
            for (std::size_t p = 0; p < r.stops.size(); ++p) {
                const Stop& s = r.stops[p];
                const Point loc = stop_location(inst, graph, s);
                const std::string where = tag + " stop " + std::to_string(p);
                if (p > 0) {
                    const Point prev = stop_location(inst, graph, r.stops[p - 1]);
                    const double t = bus_travel_time(prev, loc, bus.speed);
                    if (std::abs(r.sched.A[p] - (r.sched.D[p - 1] + t)) > kTol)
                        add("schedule", where + ": arrival != previous departure + travel time");
                    soc -= distance_km(prev, loc) * bus.consumption;
                    if (soc < bus.e_min - 1e-6) add("soc-bounds", where + ": SoC below E_min");
                }
                if (r.sched.B[p] < r.sched.A[p] - kTol)
                    add("schedule", where + ": service begins before arrival");
                if (std::abs(r.sched.W[p] - (r.sched.B[p] - r.sched.A[p])) > kTol)
                    add("schedule", where + ": waiting time inconsistent");
                const double mu = stop_service_time(inst, s);
                const double stay = s.kind == StopKind::Charger ? s.charge_duration : 0.0;
                if (std::abs(r.sched.D[p] - (r.sched.B[p] + mu + stay)) > kTol)
                    add("schedule", where + ": departure != service begin + service time");

                switch (s.kind) {
                    case StopKind::Pickup: {
                        const auto& tw = inst.requests[static_cast<std::size_t>(s.ref)].otw();
                        if (r.sched.B[p] < tw.e - kTol || r.sched.B[p] > tw.l + kTol)
                            add("time-window", where + ": pickup outside window");
                        ++q;
                        break;
                    }
                    case StopKind::Dropoff: {
                        const auto& tw = inst.requests[static_cast<std::size_t>(s.ref)].dtw();
                        if (r.sched.B[p] < tw.e - kTol || r.sched.B[p] > tw.l + kTol)
                            add("time-window", where + ": dropoff outside window");
                        --q;
                        break;
                    }
                    case StopKind::Transit: {
                        const auto& node = graph.node(s.ref);
                        if (!s.alight.empty()) {
                            if (r.sched.A[p] < node.theta_dep - inst.params.gamma - kTol ||
                                r.sched.A[p] > node.theta_dep + kTol)
                                add("transfer-window",
                                    where + ": first-mile arrival outside [theta-gamma, theta]");
                        }
                        if (!s.board.empty()) {
                            if (r.sched.B[p] < node.theta_arr - kTol ||
                                r.sched.B[p] > node.theta_arr + inst.params.gamma + kTol)
                                add("transfer-window",
                                    where + ": last-mile pickup outside [theta, theta+gamma]");
                        }
                        q += static_cast<int>(s.board.size()) - static_cast<int>(s.alight.size());
                        break;
                    }
                    case StopKind::Charger: {
                        if (q != 0) add("charge-load", where + ": passengers on board at charger");
                        const double hookup = s.charge_start - inst.params.charge_service_time;
                        if (std::abs(r.sched.B[p] - hookup) > kTol)
                            add("charge-schedule", where + ": hookup does not match booked start");
                        soc += s.charge_duration *
                               inst.chargers[static_cast<std::size_t>(s.ref)].power;
                        break;
                    }
                    case StopKind::DepotEnd:
                        if (q != 0) add("charge-load", where + ": passengers on board at depot");
                        if (r.sched.B[p] > inst.params.t_end + kTol)
                            add("time-window", where + ": route ends after the horizon");
                        break;
                    case StopKind::DepotStart:
                        if (r.sched.B[p] < -kTol) add("time-window", where + ": negative start");
                        break;
                }
                if (q > bus.capacity) add("capacity", where + ": load exceeds capacity");
                if (soc > bus.e_max + 1e-6) add("soc-bounds", where + ": SoC above E_max");
            }
        }
    }

    void check_journeys() {
        for (const auto& j : sol.journeys) {
            if (!j.served()) continue;
            const auto& req = inst.requests[static_cast<std::size_t>(j.request)];
            double dep, arr;
            if (!recompute_dep(j, dep) || !recompute_arr(j, arr)) continue;  // structure flagged it
            const std::string tag = "request " + std::to_string(j.request);
            if (std::abs(dep - j.dep) > kTol || std::abs(arr - j.arr) > kTol)
                add("journey", tag + ": stored dep/arr do not match the schedule");
            if (arr - dep > req.max_travel_time + kTol)
                add("max-travel-time", tag + ": journey time exceeds L^max");
            if (j.first_mode == LegMode::Walk) {
                if (dep < req.otw().e - kTol || dep > req.otw().l + kTol)
                    add("walk-window", tag + ": walking departure outside origin window");
            }
            if (j.uses_transit() && j.last_mode == LegMode::Walk) {
                if (arr < req.dtw().e - kTol || arr > req.dtw().l + kTol)
                    add("walk-window", tag + ": walking arrival outside destination window");
            }
        }
    }

    void check_calendars() {
        // Gather events from routes per charger, independent of the calendars.
        std::vector<std::vector<Reservation>> events(inst.chargers.size());
        for (const auto& r : sol.routes)
            for (const auto& s : r.stops)
                if (s.kind == StopKind::Charger)
                    events[static_cast<std::size_t>(s.ref)].push_back(
                        {r.bus, s.charge_start, s.charge_start + s.charge_duration});
        for (std::size_t c = 0; c < events.size(); ++c) {
            auto& ev = events[c];
            std::sort(ev.begin(), ev.end(),
                      [](const Reservation& a, const Reservation& b) { return a.start < b.start; });
            for (std::size_t i = 1; i < ev.size(); ++i)
                if (ev[i].start < ev[i - 1].end - kTol)
                    add("charger-overlap", "charger " + std::to_string(c) +
                                               ": overlapping charging events");
        }
    }

    double recompute_objective() {
        double obj = 0.0;
        for (const auto& r : sol.routes) {
            if (!r.used()) continue;
            const Bus& bus = inst.buses[static_cast<std::size_t>(r.bus)];
            for (std::size_t p = 1; p < r.stops.size(); ++p)
                obj += inst.params.lambda1 *
                       bus_travel_time(stop_location(inst, graph, r.stops[p - 1]),
                                       stop_location(inst, graph, r.stops[p]), bus.speed);
        }
        for (const auto& j : sol.journeys) {
            if (!j.served()) {
                obj += inst.params.omega;
                continue;
            }
            const auto& req = inst.requests[static_cast<std::size_t>(j.request)];
            double lbar = 0.0;
            if (j.uses_transit()) {
                const auto& tp = graph.tps[static_cast<std::size_t>(j.tp)];
                lbar += tp.travel_time;
                const auto& entry = graph.node(tp.entry);
                const auto& exit = graph.node(tp.exit);
                if (j.first_mode == LegMode::Walk)
                    lbar += walk_time(req.origin, entry.location);
                else {
                    const Route& r = sol.routes[static_cast<std::size_t>(j.first_bus)];
                    lbar += onboard_time(inst, graph, r, r.find_stop(StopKind::Pickup, j.request),
                                         r.find_transit_stop_with_alight(j.request));
                }
                if (j.last_mode == LegMode::Walk)
                    lbar += walk_time(exit.location, req.destination);
                else {
                    const Route& r = sol.routes[static_cast<std::size_t>(j.last_bus)];
                    lbar += onboard_time(inst, graph, r, r.find_transit_stop_with_board(j.request),
                                         r.find_stop(StopKind::Dropoff, j.request));
                }
            } else {
                const Route& r = sol.routes[static_cast<std::size_t>(j.first_bus)];
                lbar += onboard_time(inst, graph, r, r.find_stop(StopKind::Pickup, j.request),
                                     r.find_stop(StopKind::Dropoff, j.request));
            }
            obj += inst.params.lambda2 * lbar;
        }
        return obj;
    }
};

}  // namespace

std::string VerifyReport::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) os << "[" << v.code << "] " << v.message << "\n";
    return os.str();
}

VerifyReport verify(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol) {
    Checker c{inst, graph, sol, {}};
    c.check_structure();
    c.check_routes();
    c.check_journeys();
    c.check_calendars();
    c.report.recomputed_objective = c.recompute_objective();
    if (std::abs(c.report.recomputed_objective - sol.objective_cache) > 1e-9)
        c.add("objective", "cached objective differs from recomputation by " +
                               std::to_string(c.report.recomputed_objective - sol.objective_cache));
    return c.report;
}

}  // namespace eidarp
