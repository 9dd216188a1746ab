#pragma once

#include <vector>

#include "eidarp/feasibility.hpp"
#include "eidarp/solution.hpp"

namespace eidarp {

struct EnergyPass {
    double delta_e = 0.0;      // E_min - SoC at route end (+ = violation)
    int i_low = -1;            // first stop with SoC below E_min
    double delta_e_low = 0.0;  // E_min - SoC at i_low
    std::vector<double> soc;   // SoC on arrival at each stop (post-charge at charger stops)
};

// Propagates the state of charge along the route: consumption per arc is
// distance * beta, charger stops add duration * power.
EnergyPass energy_pass(const Instance& inst, const ExpandedTransitGraph& graph, const Route& route);

struct ChargingOutcome {
    bool needed = false;   // route had an energy violation
    bool success = false;  // violation repaired (or none existed)
};

// Repairs an energy-infeasible, time-feasible route by booking partial
// recharges at the capacitated chargers, earliest and largest first. On
// success the charger stops are spliced into `route`, its schedule is
// re-evaluated, and the reservations are committed to `calendars`. On failure
// route and calendars are left exactly as passed in.
ChargingOutcome schedule_recharges(Route& route, const EvalContext& ctx,
                                   std::vector<ChargerCalendar>& calendars);

// Splices one charging event after stop `position` and re-runs the nine-step
// evaluation. Returns false (route untouched) when the spliced route cannot
// be scheduled.
bool apply_event_to_schedule(Route& route, const EvalContext& ctx, int position, int charger,
                             double start, double duration);

}  // namespace eidarp
