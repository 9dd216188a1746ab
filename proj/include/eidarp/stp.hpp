#pragma once

#include <vector>

#include "eidarp/solution.hpp"

namespace eidarp {

// Difference-constraint system: variables x_i, constraints x_j - x_i <= w.
// Feasibility by Bellman-Ford; a feasible assignment falls out of the
// shortest-path labels. Exact up to floating point, no time grid.
class DiffSystem {
public:
    int add_var();
    // x_j - x_i <= w
    void add(int i, int j, double w);
    void add_lower(int i, double lo) { add(i, zero_, -lo); }   // x_i >= lo
    void add_upper(int i, double hi) { add(zero_, i, hi); }    // x_i <= hi
    bool solve();                       // false on negative cycle
    double value(int i) const { return dist_[static_cast<std::size_t>(i)]; }

private:
    struct Edge {
        int from, to;
        double w;
    };
    int n_ = 1;  // var 0 is the zero reference
    int zero_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> dist_;
};

// A charging event with free start/duration for the schedule system.
struct FreeChargeEvent {
    int bus = 0;
    int route_index = 0;   // index into the route vector passed to the builder
    int after_stop = 0;    // inserted between after_stop and after_stop+1
    int charger = 0;
    double min_duration = 0.0;
    double max_duration = 0.0;
    int start_var = -1;    // filled by the builder
    int end_var = -1;
    double booked_start = 0.0;     // filled on a feasible solve
    double booked_duration = 0.0;
};

// Independent schedule-existence check for a coupled set of routes: windows,
// transit synchronization, walk legs, and maximum journey times, with
// journeys resolved across routes. Energy is not modelled here (pass events
// explicitly when needed). Returns true when some feasible schedule exists.
bool schedule_exists(const Instance& inst, const ExpandedTransitGraph& graph,
                     const std::vector<Route>& routes, const std::vector<Journey>& journeys);

// Same, with free charging events and fixed orderings between events that
// share a charger (pairs of indices into `events`: first ends before second
// starts). On success, fills each event's booked start/duration.
bool schedule_exists_with_events(const Instance& inst, const ExpandedTransitGraph& graph,
                                 const std::vector<Route>& routes,
                                 const std::vector<Journey>& journeys,
                                 std::vector<FreeChargeEvent>& events,
                                 const std::vector<std::pair<int, int>>& orderings,
                                 std::vector<std::vector<double>>* assignment = nullptr);

// A feasible assignment of service-begin times for every stop (same encoding
// as schedule_exists). Empty when infeasible.
std::vector<std::vector<double>> schedule_assignment(const Instance& inst,
                                                     const ExpandedTransitGraph& graph,
                                                     const std::vector<Route>& routes,
                                                     const std::vector<Journey>& journeys);

}  // namespace eidarp
