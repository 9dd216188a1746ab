#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eidarp/instance.hpp"
#include "eidarp/transit.hpp"

namespace eidarp {

enum class StopKind : std::uint8_t { DepotStart, Pickup, Dropoff, Transit, Charger, DepotEnd };

enum class LegMode : std::uint8_t { None, Walk, Bus };

// One visited node on a bus route. Transit stops carry boarding (last-mile
// pickups off a train) and alighting (first-mile drops onto a train) labels;
// charger stops carry the booked charging event.
struct Stop {
    StopKind kind = StopKind::DepotStart;
    int ref = 0;  // request id / transit node id / charger id / depot index
    std::vector<int> board;   // request ids picked up here after their transit leg
    std::vector<int> alight;  // request ids dropped here before their transit leg
    double charge_start = 0.0;
    double charge_duration = 0.0;

    bool is_customer() const { return kind == StopKind::Pickup || kind == StopKind::Dropoff; }
};

// Per-node schedule and load/energy labels of one route.
struct Sched {
    std::vector<double> A, B, W, D;
    std::vector<int> q;
    std::vector<double> soc;
    std::vector<double> rho;  // early-arrival violation at first-mile transit stops
    bool f_delay = false;     // step-7 delay procedure applied

    void resize(std::size_t n) {
        A.assign(n, 0.0);
        B.assign(n, 0.0);
        W.assign(n, 0.0);
        D.assign(n, 0.0);
        q.assign(n, 0);
        soc.assign(n, 0.0);
        rho.assign(n, 0.0);
    }
};

struct Route {
    int bus = 0;
    std::vector<Stop> stops;  // DepotStart ... DepotEnd
    Sched sched;

    bool used() const { return stops.size() > 2; }
    int find_stop(StopKind kind, int ref) const;  // -1 if absent
    int find_transit_stop_with_alight(int request) const;
    int find_transit_stop_with_board(int request) const;
};

Route empty_route(const Instance& inst, int bus);

struct Journey {
    int request = -1;
    int option = 0;            // 1..5 served, 0 rejected
    int tp = -1;               // index into graph.tps, options 1-4
    LegMode first_mode = LegMode::None;
    LegMode last_mode = LegMode::None;
    int first_bus = -1;
    int last_bus = -1;
    // Leg-time matrix row: minutes actually in motion on each leg.
    double first_time = 0.0;   // first-mile leg (bus arcs or walk)
    double transit_time = 0.0;
    double last_time = 0.0;
    double walk_time = 0.0;    // walking portion of first+last
    double dep = 0.0;          // journey departure
    double arr = 0.0;          // journey arrival
    bool last_inserted = true; // false while an option-4 last mile is pending

    bool served() const { return option >= 1 && option <= 5; }
    bool uses_transit() const { return option >= 1 && option <= 4; }
    // In-motion travel time (excludes waits and service), the objective's
    // customer term.
    double lbar() const { return first_time + transit_time + last_time; }
    double in_bus_time() const {
        return (first_mode == LegMode::Bus ? first_time : 0.0) +
               (last_mode == LegMode::Bus ? last_time : 0.0);
    }
};

struct Reservation {
    int bus = 0;
    double start = 0.0;
    double end = 0.0;
};

// Ordered, non-overlapping reserved charging intervals of one charger.
struct ChargerCalendar {
    std::vector<Reservation> reserved;

    void insert(const Reservation& r);
    void release(int bus);
    // Gaps between reservations over [0, +inf).
    std::vector<std::pair<double, double>> vacant() const;
    bool overlaps(double start, double end) const;
};

struct Solution {
    std::vector<Route> routes;       // one slot per bus
    std::vector<Journey> journeys;   // one per request
    std::vector<ChargerCalendar> calendars;  // one per charger
    double objective_cache = 0.0;
    std::uint64_t seed = 0;

    std::vector<int> rejected() const;
    std::vector<int> served() const;
    int n_rejected() const;
};

Solution make_empty_solution(const Instance& inst);

double route_travel_time(const Instance& inst, const ExpandedTransitGraph& graph, const Route& r);

// Driving time between two stop indices of a route (what an onboard customer
// experiences, waits and service excluded).
double onboard_time(const Instance& inst, const ExpandedTransitGraph& graph, const Route& r,
                    int from_stop, int to_stop);

// lambda1 * sum(route travel times) + lambda2 * sum(Lbar_r) + omega * |rejected|
double compute_objective(const Instance& inst, const ExpandedTransitGraph& graph,
                         const Solution& sol);

struct KpiReport {
    double btt = 0.0;
    double rt = 0.0;
    double ctt = 0.0;
    double ctt_transit = 0.0;
    double ctt_bus = 0.0;
    double ctt_walk = 0.0;
    double wt = 0.0;
    int n_cus_transit = 0;
    int n_used_buses = 0;
    double cus_per_bus = 0.0;
    int n_reject = 0;
    int n_to4 = 0;
    double objective = 0.0;
    double runtime_s = 0.0;
};

KpiReport compute_kpis(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol);

// Experienced waiting time of one served customer: transfer waits at transit
// stations (both directions) plus service-start delay past max(A, e) at the
// origin pickup.
double customer_wait_time(const Instance& inst, const ExpandedTransitGraph& graph,
                          const Solution& sol, int request);

// Location and static window of a stop, resolved against the instance/graph.
Point stop_location(const Instance& inst, const ExpandedTransitGraph& graph, const Stop& s);
double stop_service_time(const Instance& inst, const Stop& s);

// Refresh journey leg times / dep / arr of every customer travelling on this
// route from the committed schedule. Journeys on other routes are untouched.
void refresh_route_journeys(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                            int bus);

// Removes a customer's whole trip: all bus stops and labels on every involved
// route, the journey, and (transitively) the charging events of the touched
// routes, which are re-planned. Customers whose routes can no longer be
// scheduled are unloaded into `extra_unserved`.
void remove_customer(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                     int request, std::vector<int>& extra_unserved);

std::string kpi_csv_header();
std::string kpi_csv_row(const KpiReport& k);

}  // namespace eidarp
