#pragma once

#include <map>
#include <string>
#include <vector>

#include "eidarp/solution.hpp"

namespace eidarp {

// Resolves routes and journeys during candidate evaluation. Overrides shadow
// the committed solution so pending (not yet applied) edits are visible.
struct EvalContext {
    const Instance* inst = nullptr;
    const ExpandedTransitGraph* graph = nullptr;
    const Solution* sol = nullptr;
    std::map<int, const Route*> route_overrides;      // bus -> pending route
    std::map<int, const Journey*> journey_overrides;  // request -> pending journey

    EvalContext(const Instance& i, const ExpandedTransitGraph& g, const Solution& s)
        : inst(&i), graph(&g), sol(&s) {}

    const Journey& journey(int request) const {
        auto it = journey_overrides.find(request);
        if (it != journey_overrides.end()) return *it->second;
        return sol->journeys[static_cast<std::size_t>(request)];
    }
    const Route& route(int bus) const {
        auto it = route_overrides.find(bus);
        if (it != route_overrides.end()) return *it->second;
        return sol->routes[static_cast<std::size_t>(bus)];
    }
};

struct EvalVerdict {
    bool feasible = false;
    int fail_step = 0;   // step at which infeasibility was established
    int fail_stop = -1;
    std::string reason;
};

// Nine-step evaluation of one bus route. On a feasible verdict the schedule
// (A/B/W/D/q/rho, f_delay) is left in `route`; any first-mile route delayed
// by the step-8 repair is returned in `delayed_first_miles` (bus -> modified
// copy) and must be committed together with `route`. Energy is not checked
// here; the charging scheduler runs afterwards.
EvalVerdict nine_step_evaluate(Route& route, const EvalContext& ctx,
                               std::map<int, Route>* delayed_first_miles = nullptr);

// Forward slack time F_i of a scheduled route (Eq.-(3)-style generalization:
// cumulative downstream waits plus the binding slack of transfer windows,
// customer windows, maximum travel times, and the horizon end).
double forward_slack(const Route& route, const EvalContext& ctx, int i);

// Journey departure/arrival resolved against live schedules. `local` is the
// route currently being evaluated (consulted before the context), `delayed`
// optional step-8 copies.
struct EndpointResolver {
    const EvalContext* ctx;
    const Route* local = nullptr;
    const std::map<int, Route>* delayed = nullptr;

    const Route* route_for(int bus) const;
    bool dep_of(int request, double& out) const;
    bool arr_of(int request, double& out) const;
    // Current door-to-door travel time, false when not yet computable.
    bool travel_time_of(int request, double& out) const;
};

}  // namespace eidarp
