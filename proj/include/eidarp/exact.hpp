#pragma once

#include "eidarp/solution.hpp"

namespace eidarp {

// Exhaustive optimum for desk-scale instances: enumerates customer travel
// patterns (option, transit pair, serving buses, rejection), all route stop
// orderings with pairing/capacity pruning, and charging insertions (at most
// two events per route, durations on a 0.1-minute grid); schedule existence
// is decided exactly per candidate. Guarded to n <= 4, buses <= 2, transit
// nodes <= 12.
struct ExactResult {
    bool solved = false;
    Solution best;
};

ExactResult brute_force_solve(const Instance& inst, const ExpandedTransitGraph& graph);

bool brute_force_guard_ok(const Instance& inst, const ExpandedTransitGraph& graph);

}  // namespace eidarp
