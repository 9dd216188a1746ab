#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eidarp/geometry.hpp"

namespace eidarp {

struct TimeWindow {
    double e = 0.0;
    double l = 0.0;
    bool empty() const { return l < e - kEpsTime; }
    double width() const { return l - e; }
};

// Global model and search parameters. Defaults are the tuned configuration:
// LNS knobs (600, 1.0, 700, 0.25, 1.06) plus the numerical-study settings.
struct Params {
    double lambda1 = 1.0;             // weight on bus travel time
    double lambda2 = 1.0;             // weight on customer travel time
    double omega = 200.0;             // rejection penalty per customer
    double phi = 1.5;                 // detour factor, >= 1
    double gamma = 10.0;              // max transfer wait at transit stations (min)
    double eta_min = 1.0;             // min intra-station transfer time (min)
    double eta_max = 10.0;            // max intra-station transfer time (min)
    double max_walk_dist = 1.5;       // km
    double walk_speed = 0.085;        // km/min
    double service_time = 0.5;        // mu, min per customer/transit stop
    double charge_service_time = 1.0; // min per charging hookup
    double t_end = 120.0;             // planning horizon end (min)
    double tw_width = 15.0;           // customer time window width (min)

    int n_iter = 600;
    double t_max_factor = 1.0;
    double t_red = 700.0;
    double xi_max = 0.25;
    double alpha_ls = 1.06;

    void validate() const {
        if (phi < 1.0) throw std::runtime_error("params: phi must be >= 1");
        if (gamma < 0.0) throw std::runtime_error("params: gamma must be >= 0");
        if (!(xi_max > 0.0 && xi_max < 1.0)) throw std::runtime_error("params: xi_max must be in (0,1)");
        if (alpha_ls <= 1.0) throw std::runtime_error("params: alpha_ls must be > 1");
        if (eta_min > eta_max) throw std::runtime_error("params: eta_min must be <= eta_max");
        if (walk_speed <= 0.0) throw std::runtime_error("params: walk_speed must be > 0");
        if (t_end <= 0.0) throw std::runtime_error("params: t_end must be > 0");
    }
};

struct Request {
    int id = 0;
    Point origin;
    Point destination;
    // Exactly one of the two windows is user-given; the other is derived.
    std::optional<TimeWindow> origin_tw;
    std::optional<TimeWindow> dest_tw;
    bool origin_given = true;

    // Derived on load.
    double direct_bus_time = 0.0;  // t_{r,n+r}, min
    double max_travel_time = 0.0;  // L_r^max = direct * phi
    bool bus_window_empty = false; // derived window clipped empty: unservable by bus alone

    const TimeWindow& otw() const { return *origin_tw; }
    const TimeWindow& dtw() const { return *dest_tw; }
};

struct Bus {
    int id = 0;
    int type_id = 0;
    int capacity = 0;            // Q^k, passengers
    double consumption = 0.0;    // beta^k, kWh/km
    double battery_capacity = 0.0; // kWh
    double e_min = 0.0;
    double e_max = 0.0;
    double e_init = 0.0;
    int origin_depot = 0;
    int dest_depot = 0;
    double speed = 0.0;          // km/min
};

struct Charger {
    int id = 0;
    Point location;
    double power = 0.0;          // alpha_s, kWh/min
};

// One scheduled run of a transit line: per-station departure times in travel
// order. A reverse run visits the line's station list back to front.
struct TransitRun {
    bool reverse = false;
    std::vector<double> times;   // strictly increasing, one per station
};

struct TransitLine {
    int id = 0;
    std::vector<Point> stations;
    std::vector<TransitRun> runs;
    double speed = 0.0;          // km/min, informational for generated lines
    double dwell = 0.0;          // min, arrival = departure - dwell at intermediate stops
};

struct Instance {
    Params params;
    std::vector<Request> requests;
    std::vector<Bus> buses;
    std::vector<Point> depots;
    std::vector<Charger> chargers;
    std::vector<TransitLine> lines;
    std::uint64_t rng_seed = 0;

    int n() const { return static_cast<int>(requests.size()); }

    // Reference speed for direct travel times / L_r^max: the fastest bus.
    double ref_bus_speed() const {
        double s = 0.0;
        for (const auto& b : buses) s = std::max(s, b.speed);
        return s > 0.0 ? s : 25.0 / 60.0;
    }

    // Longest distance between any two bus-visitable points (c_max) and the
    // mean pairwise distance (c_bar), both used by the search layer.
    double max_arc_distance() const;
    double mean_arc_distance() const;

    void finalize();             // derive windows, L^max, validate
    void validate() const;
};

// Derives the missing window of r from the given one:
//   origin given:  dest_tw   = [e_r + direct, l_r + L^max]
//   dest given:    origin_tw = [e_{n+r} - L^max, l_{n+r} - direct]
// clipped to [0, t_end]. An empty clipped window flags the request as
// unservable by bus alone (transit options may still serve it).
void derive_time_windows(Request& r, const Params& params);

double bus_travel_time(const Point& a, const Point& b, double speed_km_min);

}  // namespace eidarp
