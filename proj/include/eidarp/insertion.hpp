#pragma once

#include <map>
#include <vector>

#include "eidarp/solution.hpp"

namespace eidarp {

// A fully evaluated, committable placement of one customer.
struct InsertionPlan {
    bool feasible = false;
    double delta_cost = 0.0;            // objective change including -omega
    Journey journey;
    std::map<int, Route> routes;        // bus -> new route (edited + step-8 delayed)
    bool cal_touched = false;
    std::vector<ChargerCalendar> calendars;  // full copy when cal_touched
};

struct InsertionQuery {
    int request = -1;
    int force_option = 0;   // 0 = any of 1..5
    int force_tp = -1;      // restrict options 1-4 to one transit pair
    int k_costs = 1;        // how many best candidate costs to report
};

struct InsertionResult {
    InsertionPlan best;
    std::vector<double> costs;  // ascending candidate costs, up to k_costs
};

// Best travel option and insertion positions for one unserved customer:
// evaluates all five travel options (option 4 inserts the first mile first,
// then the best last mile) over every route, including merges into existing
// transit stop visits.
InsertionResult find_best_insertion(const Instance& inst, const ExpandedTransitGraph& graph,
                                    const Solution& sol, const InsertionQuery& query);

void apply_insertion(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                     const InsertionPlan& plan);

// Customer in-motion time recomputed against a set of route copies (falls
// back to the committed solution for unmodified buses).
double journey_lbar_against(const Instance& inst, const ExpandedTransitGraph& graph,
                            const Solution& sol, const std::map<int, Route>& overrides,
                            const Journey& j);

}  // namespace eidarp
