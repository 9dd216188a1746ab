#pragma once

#include <string>
#include <vector>

#include "eidarp/solution.hpp"

namespace eidarp {

struct Violation {
    std::string code;     // constraint family, e.g. "pairing", "capacity", "soc-bounds"
    std::string message;  // node/route context
};

struct VerifyReport {
    std::vector<Violation> violations;
    double recomputed_objective = 0.0;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

// Full-constraint check of a solution against the model semantics: depot
// start/end, pairing and flow consistency, at most one transit leg, same-bus
// service unless transit is used, capacity, schedule consistency and windows,
// transfer windows at transit nodes, walk-leg windows, maximum journey times,
// SoC dynamics and bounds, charger non-overlap, and objective recomputation.
// Independent of the solver's internal evaluation path.
VerifyReport verify(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol);

}  // namespace eidarp
