#include "eidarp/charging.hpp"

#include <algorithm>
#include <cmath>

namespace eidarp {

EnergyPass energy_pass(const Instance& inst, const ExpandedTransitGraph& graph, const Route& route) {
    const Bus& bus = inst.buses[static_cast<std::size_t>(route.bus)];
    EnergyPass out;
    out.soc.resize(route.stops.size());
    double e = bus.e_init;
    out.soc[0] = e;
    for (std::size_t p = 1; p < route.stops.size(); ++p) {
        const double d = distance_km(stop_location(inst, graph, route.stops[p - 1]),
                                     stop_location(inst, graph, route.stops[p]));
        e -= d * bus.consumption;
        out.soc[p] = e;
        if (out.i_low < 0 && e < bus.e_min - kEpsEnergy) {
            out.i_low = static_cast<int>(p);
            out.delta_e_low = bus.e_min - e;
        }
        if (route.stops[p].kind == StopKind::Charger) {
            e += route.stops[p].charge_duration *
                 inst.chargers[static_cast<std::size_t>(route.stops[p].ref)].power;
        }
    }
    out.delta_e = bus.e_min - e;
    return out;
}

bool apply_event_to_schedule(Route& route, const EvalContext& ctx, int position, int charger,
                             double start, double duration) {
    Route candidate = route;
    Stop s;
    s.kind = StopKind::Charger;
    s.ref = charger;
    s.charge_start = start;
    s.charge_duration = duration;
    candidate.stops.insert(candidate.stops.begin() + position + 1, s);
    const EvalVerdict v = nine_step_evaluate(candidate, ctx);
    if (!v.feasible) return false;
    route = std::move(candidate);
    return true;
}

ChargingOutcome schedule_recharges(Route& route, const EvalContext& ctx,
                                   std::vector<ChargerCalendar>& calendars) {
    const Instance& inst = *ctx.inst;
    const Bus& bus = inst.buses[static_cast<std::size_t>(route.bus)];
    ChargingOutcome out;

    EnergyPass ep = energy_pass(inst, *ctx.graph, route);
    if (ep.delta_e <= kEpsEnergy) {
        out.success = true;  // recharging scheduling is skipped
        return out;
    }
    out.needed = true;

    Route working = route;
    std::vector<ChargerCalendar> cal = calendars;
    double delta_e = ep.delta_e;
    double delta_e_low = ep.delta_e_low;
    int i_low = ep.i_low;
    std::vector<double> soc = ep.soc;

    // Candidate insertion positions: after any stop served with nobody on
    // board (the depot start included), strictly before the first violation.
    std::size_t pos = 0;
    while (pos + 1 < working.stops.size()) {
        if (static_cast<int>(pos) >= i_low) break;  // can no longer fix the first violation
        if (working.sched.q[pos] != 0) {
            ++pos;
            continue;
        }
        const double f_pos = forward_slack(working, ctx, static_cast<int>(pos));
        const Point from = stop_location(inst, *ctx.graph, working.stops[pos]);
        const Point to = stop_location(inst, *ctx.graph, working.stops[pos + 1]);
        const double t_direct = bus_travel_time(from, to, bus.speed);
        // Departing the depot earlier than the scheduled (delayed) departure
        // buys extra room for a charge at the start of the route.
        const double depot_bonus = pos == 0 ? working.sched.D[0] : 0.0;
        const double depart = pos == 0 ? 0.0 : working.sched.D[pos];

        // Chargers by detour distance, ascending; ties by id.
        std::vector<int> order(inst.chargers.size());
        for (std::size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double da = distance_km(from, inst.chargers[static_cast<std::size_t>(a)].location);
            const double db = distance_km(from, inst.chargers[static_cast<std::size_t>(b)].location);
            if (da != db) return da < db;
            return a < b;
        });

        bool booked_here = false;
        bool done = false;
        for (int cid : order) {
            const Charger& chg = inst.chargers[static_cast<std::size_t>(cid)];
            const double d_to = distance_km(from, chg.location);
            const double d_back = distance_km(chg.location, to);
            const double d_direct = distance_km(from, to);
            const double detour_time = (d_to + d_back) / bus.speed - t_direct;
            const double detour_energy = (d_to + d_back - d_direct) * bus.consumption;

            const double soc_at_charger = soc[pos] - d_to * bus.consumption;
            if (soc_at_charger < bus.e_min - kEpsEnergy) continue;  // cannot even reach it

            const double need_total = delta_e + detour_energy;
            const double need_min = delta_e_low + detour_energy;
            const double cap = bus.e_max - soc_at_charger;  // headroom to E_max
            double d_max = need_total / chg.power;
            const double d_min = need_min / chg.power;
            const double d_cap = cap / chg.power;
            const bool capped = d_cap < d_max - kEpsTime;
            if (capped) d_max = d_cap;
            if (d_cap < d_min - kEpsTime) continue;

            const double avail = f_pos + depot_bonus - detour_time - inst.params.charge_service_time;
            if (avail < d_min - kEpsTime) continue;  // line 8: next charger

            const double win_start = depart + d_to / bus.speed + inst.params.charge_service_time;
            const double win_end = win_start + avail;

            bool any_overlap = false;
            for (const auto& gap : cal[static_cast<std::size_t>(cid)].vacant()) {
                const double s = std::max(gap.first, win_start);
                const double e = std::min(gap.second, win_end);
                if (e <= s + kEpsTime) continue;
                any_overlap = true;
                const double slot = e - s;
                double dur = 0.0;
                bool full = false;
                if (slot >= d_max - kEpsTime) {
                    dur = d_max;
                    full = !capped;
                } else if (slot >= d_min - kEpsTime) {
                    dur = slot;
                } else {
                    continue;  // too short, next vacant interval
                }
                // Book at the earliest point of the common interval.
                if (!apply_event_to_schedule(working, ctx, static_cast<int>(pos), cid, s, dur))
                    continue;
                cal[static_cast<std::size_t>(cid)].insert({route.bus, s, s + dur});
                booked_here = true;
                if (full) {
                    done = true;
                } else {
                    EnergyPass np = energy_pass(inst, *ctx.graph, working);
                    if (np.delta_e <= kEpsEnergy) {
                        done = true;
                    } else {
                        delta_e = np.delta_e;
                        delta_e_low = np.delta_e_low;
                        i_low = np.i_low;
                        soc = np.soc;
                    }
                }
                break;
            }
            if (booked_here) break;
            if (!any_overlap) break;  // no common interval at the nearest usable charger: next position
        }
        if (done) {
            route = std::move(working);
            calendars = std::move(cal);
            out.success = true;
            return out;
        }
        ++pos;
        if (booked_here) {
            // stop indices shifted by the spliced charger stop; recompute soc for
            // the new stop list was done above, position continues past the event
            ++pos;
        }
    }
    // Failure: roll back everything (working/cal were local copies).
    return out;
}

}  // namespace eidarp
