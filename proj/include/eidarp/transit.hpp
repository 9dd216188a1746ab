#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eidarp/instance.hpp"

namespace eidarp {

// One node of the departure-expanded transit graph. Ids are 1-based in the
// order (run start time, line id, run index, station along travel direction).
struct TransitNode {
    int id = 0;            // 1-based
    int line_id = 0;
    int run_index = 0;     // index into line.runs
    int station_index = 0; // position along the run's travel direction
    Point location;
    double theta_dep = 0.0; // scheduled departure at this node
    double theta_arr = 0.0; // scheduled arrival (== departure - dwell; == dep at run start)
    TimeWindow tw;          // [theta_dep - gamma, theta_arr + gamma]
    bool is_run_first = false;
    bool is_run_last = false;
};

// A transit pair: board at entry (departure theta_dep), alight at exit
// (arrival theta_arr), shortest feasible in-transit time in between.
struct TransitPair {
    int entry = 0;  // TransitNode id
    int exit = 0;
    double travel_time = 0.0;  // t^m, min
    int transfers = 0;
};

// Transfer arc of the temporary graph (kept only if the eta window holds).
struct TransferArc {
    int from = 0;
    int to = 0;
    double wait = 0.0;
};

// Option flags for a (customer, TP) combination; bit k-1 set = option k viable.
enum TpOptionBits : std::uint8_t {
    kOpt1 = 1u << 0,  // walk + transit + walk
    kOpt2 = 1u << 1,  // bus + transit + walk
    kOpt3 = 1u << 2,  // walk + transit + bus
    kOpt4 = 1u << 3,  // bus + transit + bus
};

struct CustomerTp {
    int tp = 0;                // index into ExpandedTransitGraph::tps
    std::uint8_t options = 0;  // TpOptionBits
};

struct ExpandedTransitGraph {
    std::vector<TransitNode> nodes;
    std::vector<TransitPair> tps;
    std::vector<TransferArc> transfer_arcs;      // survivors of the eta pruning
    std::vector<std::vector<CustomerTp>> per_customer;
    std::size_t tp_union_size = 0;               // |union_r T_r|, for relatedness

    const TransitNode& node(int id) const { return nodes[static_cast<std::size_t>(id - 1)]; }
    bool empty() const { return nodes.empty(); }
    int tp_index(int entry, int exit) const;     // -1 if absent
};

std::vector<TransitNode> expand_timetables(const std::vector<TransitLine>& lines, double gamma);

// Algorithm: build the temporary graph of direct arcs (all ordered pairs
// within a run) and eta-feasible transfer arcs between co-located nodes of
// different lines, run one shortest-path pass per source, keep reachable
// pairs whose path boards and alights on a vehicle (first and last arc
// direct) and whose endpoints are distinct physical stations.
// Transfer arcs are only generated from nodes with a real arrival
// (station_index > 0) to nodes with a real departure (not run-last).
struct TpGenResult {
    std::vector<TransitPair> tps;
    std::vector<TransferArc> transfer_arcs;
};
TpGenResult generate_transit_pairs(const std::vector<TransitNode>& nodes, double eta_min,
                                   double eta_max, bool parallel = true);

// Serial reference used by tests and the benchmark.
TpGenResult generate_transit_pairs_serial(const std::vector<TransitNode>& nodes, double eta_min,
                                          double eta_max);

std::vector<CustomerTp> customer_tp_set(const Request& r, const std::vector<TransitNode>& nodes,
                                        const std::vector<TransitPair>& tps, const Params& params,
                                        double bus_speed);

ExpandedTransitGraph build_transit_graph(const Instance& inst, bool parallel = true);

// Walking time in minutes, or a negative value when the leg exceeds the
// maximum walking distance.
double walk_time_or_reject(const Point& a, const Point& b, const Params& params);

std::string nodes_csv(const ExpandedTransitGraph& g);
std::string tps_csv(const ExpandedTransitGraph& g);

}  // namespace eidarp
