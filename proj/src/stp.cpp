#include "eidarp/stp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace eidarp {

int DiffSystem::add_var() { return n_++; }

void DiffSystem::add(int i, int j, double w) { edges_.push_back({i, j, w}); }

bool DiffSystem::solve() {
    // Shortest paths from the zero reference over constraint edges
    // (x_j <= x_i + w becomes edge i -> j of weight w). Start every label at 0
    // so unconnected variables stay finite.
    dist_.assign(static_cast<std::size_t>(n_), 0.0);
    for (int pass = 0; pass < n_; ++pass) {
        bool changed = false;
        for (const auto& e : edges_) {
            const double cand = dist_[static_cast<std::size_t>(e.from)] + e.w;
            if (cand < dist_[static_cast<std::size_t>(e.to)] - 1e-12) {
                dist_[static_cast<std::size_t>(e.to)] = cand;
                changed = true;
            }
        }
        if (!changed) return true;
    }
    // One more relaxation round detects a negative cycle.
    for (const auto& e : edges_)
        if (dist_[static_cast<std::size_t>(e.from)] + e.w <
            dist_[static_cast<std::size_t>(e.to)] - 1e-9)
            return false;
    return true;
}

namespace {

struct SystemBuild {
    DiffSystem sys;
    // var of B at stop p of route r
    std::vector<std::vector<int>> bvar;
    bool structurally_ok = true;
};

// Encode the schedule constraints of a set of routes. Conventions follow the
// model semantics: service may start after arrival at any node (waiting),
// first-mile transfer windows bind the arrival, last-mile windows the service
// start, and journey times bind departure/arrival pairs possibly on
// different routes.
SystemBuild build_system(const Instance& inst, const ExpandedTransitGraph& graph,
                         const std::vector<Route>& routes, const std::vector<Journey>& journeys,
                         std::vector<FreeChargeEvent>* events) {
    SystemBuild b;
    b.bvar.resize(routes.size());

    // Map (route index, after_stop) -> event index for chain interruption.
    std::map<std::pair<int, int>, int> event_at;
    if (events)
        for (std::size_t e = 0; e < events->size(); ++e) {
            (*events)[e].start_var = b.sys.add_var();
            (*events)[e].end_var = b.sys.add_var();
            event_at[{(*events)[e].route_index, (*events)[e].after_stop}] = static_cast<int>(e);
        }

    for (std::size_t ri = 0; ri < routes.size(); ++ri) {
        const Route& route = routes[ri];
        const Bus& bus = inst.buses[static_cast<std::size_t>(route.bus)];
        auto& vars = b.bvar[ri];
        vars.resize(route.stops.size());
        for (auto& v : vars) v = b.sys.add_var();

        for (std::size_t p = 0; p < route.stops.size(); ++p) {
            const Stop& s = route.stops[p];
            const int v = vars[p];
            b.sys.add_lower(v, 0.0);
            switch (s.kind) {
                case StopKind::DepotStart:
                case StopKind::DepotEnd:
                    b.sys.add_upper(v, inst.params.t_end);
                    break;
                case StopKind::Pickup: {
                    const auto& tw = inst.requests[static_cast<std::size_t>(s.ref)].otw();
                    b.sys.add_lower(v, tw.e);
                    b.sys.add_upper(v, tw.l);
                    break;
                }
                case StopKind::Dropoff: {
                    const auto& tw = inst.requests[static_cast<std::size_t>(s.ref)].dtw();
                    b.sys.add_lower(v, tw.e);
                    b.sys.add_upper(v, tw.l);
                    break;
                }
                case StopKind::Transit: {
                    const auto& node = graph.node(s.ref);
                    if (!s.board.empty()) {
                        b.sys.add_lower(v, node.theta_arr);
                        b.sys.add_upper(v, node.theta_arr + inst.params.gamma);
                    }
                    break;
                }
                case StopKind::Charger: {
                    // Fixed events keep their booked slot.
                    const double hookup = s.charge_start - inst.params.charge_service_time;
                    b.sys.add_lower(v, hookup);
                    b.sys.add_upper(v, hookup);
                    break;
                }
            }
            if (p == 0) continue;

            const Stop& prev = route.stops[p - 1];
            const Point from = stop_location(inst, graph, prev);
            const Point to = stop_location(inst, graph, s);
            const double mu_prev = stop_service_time(inst, prev);
            const double stay_prev = prev.kind == StopKind::Charger ? prev.charge_duration : 0.0;
            const double hop = mu_prev + stay_prev + bus_travel_time(from, to, bus.speed);

            auto ev_it = event_at.find({static_cast<int>(ri), static_cast<int>(p - 1)});
            if (events && ev_it != event_at.end()) {
                // Chain runs through a free charging event: prev -> charger -> p.
                FreeChargeEvent& ev = (*events)[static_cast<std::size_t>(ev_it->second)];
                const Point cs = inst.chargers[static_cast<std::size_t>(ev.charger)].location;
                const double to_s = bus_travel_time(from, cs, bus.speed);
                const double back = bus_travel_time(cs, to, bus.speed);
                // start >= B_prev + mu_prev + travel + hookup
                b.sys.add(ev.start_var, vars[p - 1],
                          -(mu_prev + stay_prev + to_s + inst.params.charge_service_time));
                // duration bounds
                b.sys.add(ev.end_var, ev.start_var, -ev.min_duration);
                b.sys.add(ev.start_var, ev.end_var, ev.max_duration);
                // B_p >= end + travel back
                b.sys.add(vars[p], ev.end_var, -back);
                b.sys.add_lower(ev.start_var, 0.0);
                b.sys.add_upper(ev.end_var, inst.params.t_end);
            } else {
                // B_p >= B_{p-1} + hop  <=>  B_{p-1} - B_p <= -hop
                b.sys.add(vars[p], vars[p - 1], -hop);
            }

            // First-mile synchronization binds the arrival, which equals
            // B_{p-1} + hop exactly (driving straight from the previous stop).
            if (s.kind == StopKind::Transit && !s.alight.empty()) {
                const auto& node = graph.node(s.ref);
                // theta - gamma <= B_{p-1} + hop <= theta
                b.sys.add_lower(vars[p - 1], node.theta_dep - inst.params.gamma - hop);
                b.sys.add_upper(vars[p - 1], node.theta_dep - hop);
                if (events && ev_it != event_at.end()) b.structurally_ok = false;  // not supported
            }
        }
    }

    // Journey time constraints, resolved across routes.
    for (const auto& j : journeys) {
        if (!j.served()) continue;
        const auto& req = inst.requests[static_cast<std::size_t>(j.request)];
        const double lmax = req.max_travel_time;

        auto find_bvar = [&](int bus, StopKind kind, int ref, bool board_label,
                             bool alight_label) -> int {
            for (std::size_t ri = 0; ri < routes.size(); ++ri) {
                if (routes[ri].bus != bus) continue;
                if (board_label) {
                    const int p = routes[ri].find_transit_stop_with_board(ref);
                    return p >= 0 ? b.bvar[ri][static_cast<std::size_t>(p)] : -1;
                }
                if (alight_label) {
                    const int p = routes[ri].find_transit_stop_with_alight(ref);
                    return p >= 0 ? b.bvar[ri][static_cast<std::size_t>(p)] : -1;
                }
                const int p = routes[ri].find_stop(kind, ref);
                return p >= 0 ? b.bvar[ri][static_cast<std::size_t>(p)] : -1;
            }
            return -1;
        };

        double dep_const = 0.0;
        int dep_var = -1;
        if (j.first_mode == LegMode::Walk) {
            const auto& entry = graph.node(graph.tps[static_cast<std::size_t>(j.tp)].entry);
            dep_const = entry.theta_dep -
                        distance_km(req.origin, entry.location) / inst.params.walk_speed;
        } else {
            dep_var = find_bvar(j.first_bus, StopKind::Pickup, j.request, false, false);
            if (dep_var < 0) {
                b.structurally_ok = false;
                continue;
            }
        }

        double arr_const = 0.0;
        int arr_var = -1;
        if (j.option == 5) {
            arr_var = find_bvar(j.first_bus, StopKind::Dropoff, j.request, false, false);
        } else if (j.last_mode == LegMode::Walk) {
            const auto& exit = graph.node(graph.tps[static_cast<std::size_t>(j.tp)].exit);
            arr_const = exit.theta_arr +
                        distance_km(exit.location, req.destination) / inst.params.walk_speed;
        } else if (j.last_inserted) {
            arr_var = find_bvar(j.last_bus, StopKind::Dropoff, j.request, false, false);
        } else {
            continue;  // pending option-4 last mile: constraint deferred
        }
        if (j.option != 5 && j.last_mode == LegMode::Bus && arr_var < 0 && j.last_inserted) {
            b.structurally_ok = false;
            continue;
        }

        if (dep_var >= 0 && arr_var >= 0) {
            b.sys.add(dep_var, arr_var, lmax);  // arr - dep <= lmax
        } else if (dep_var >= 0) {
            b.sys.add_lower(dep_var, arr_const - lmax);  // dep >= arr - lmax
        } else if (arr_var >= 0) {
            b.sys.add_upper(arr_var, dep_const + lmax);
        } else {
            if (arr_const - dep_const > lmax + kEpsTime) b.structurally_ok = false;
        }

        // Walking legs must respect the customers' windows exactly.
        if (j.first_mode == LegMode::Walk &&
            (dep_const < req.otw().e - kEpsTime || dep_const > req.otw().l + kEpsTime))
            b.structurally_ok = false;
        if (j.option != 5 && j.last_mode == LegMode::Walk &&
            (arr_const < req.dtw().e - kEpsTime || arr_const > req.dtw().l + kEpsTime))
            b.structurally_ok = false;
    }
    return b;
}

}  // namespace

bool schedule_exists(const Instance& inst, const ExpandedTransitGraph& graph,
                     const std::vector<Route>& routes, const std::vector<Journey>& journeys) {
    SystemBuild b = build_system(inst, graph, routes, journeys, nullptr);
    if (!b.structurally_ok) return false;
    return b.sys.solve();
}

bool schedule_exists_with_events(const Instance& inst, const ExpandedTransitGraph& graph,
                                 const std::vector<Route>& routes,
                                 const std::vector<Journey>& journeys,
                                 std::vector<FreeChargeEvent>& events,
                                 const std::vector<std::pair<int, int>>& orderings,
                                 std::vector<std::vector<double>>* assignment) {
    SystemBuild b = build_system(inst, graph, routes, journeys, &events);
    if (!b.structurally_ok) return false;
    for (const auto& [first, second] : orderings)
        b.sys.add(events[static_cast<std::size_t>(second)].start_var,
                  events[static_cast<std::size_t>(first)].end_var, 0.0);  // end1 <= start2
    if (!b.sys.solve()) return false;
    const double z = b.sys.value(0);
    for (auto& ev : events) {
        ev.booked_start = b.sys.value(ev.start_var) - z;
        ev.booked_duration = b.sys.value(ev.end_var) - b.sys.value(ev.start_var);
    }
    if (assignment) {
        assignment->assign(routes.size(), {});
        for (std::size_t ri = 0; ri < routes.size(); ++ri) {
            (*assignment)[ri].resize(routes[ri].stops.size());
            for (std::size_t p = 0; p < (*assignment)[ri].size(); ++p)
                (*assignment)[ri][p] = b.sys.value(b.bvar[ri][p]) - z;
        }
    }
    return true;
}

std::vector<std::vector<double>> schedule_assignment(const Instance& inst,
                                                     const ExpandedTransitGraph& graph,
                                                     const std::vector<Route>& routes,
                                                     const std::vector<Journey>& journeys) {
    SystemBuild b = build_system(inst, graph, routes, journeys, nullptr);
    if (!b.structurally_ok || !b.sys.solve()) return {};
    const double z = b.sys.value(0);
    std::vector<std::vector<double>> out(routes.size());
    for (std::size_t ri = 0; ri < routes.size(); ++ri) {
        out[ri].resize(routes[ri].stops.size());
        for (std::size_t p = 0; p < out[ri].size(); ++p)
            out[ri][p] = b.sys.value(b.bvar[ri][p]) - z;
    }
    return out;
}

}  // namespace eidarp
