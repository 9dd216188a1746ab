#pragma once

#include <string>

#include "eidarp/solution.hpp"

namespace eidarp {

// Instance file: one JSON document with top-level keys
// params / requests / buses / depots / chargers / lines / seed.
// Units: km, minutes, kWh, km/min. Loader validates invariants and reports
// the offending element in the error message.
Instance load_instance(const std::string& path);
Instance instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

// Solution file: routes with per-stop schedule labels, charging events,
// journeys, rejection set, KPI block, and the cached objective.
std::string solution_to_json_text(const Instance& inst, const ExpandedTransitGraph& graph,
                                  const Solution& sol);
void save_solution(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol,
                   const std::string& path);
Solution load_solution(const Instance& inst, const ExpandedTransitGraph& graph,
                       const std::string& path);
Solution solution_from_json_text(const Instance& inst, const ExpandedTransitGraph& graph,
                                 const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace eidarp
