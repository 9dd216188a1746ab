#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eidarp/instance.hpp"
#include "eidarp/search.hpp"

namespace eidarp {

// Synthetic-instance settings. Defaults reproduce the numerical-study
// baseline: a 16x16 km area, two crossed bi-directional transit lines with a
// shared center station, two depots each with one DC fast charger, and a
// heterogeneous two-type bus fleet.
struct GeneratorConfig {
    double area = 16.0;                 // km, square side
    int n = 50;                         // customers
    double outbound_fraction = 0.5;     // outbound customers give the origin window
    std::string layout = "two";         // none | one | two | three | four transit lines
    int departures_per_direction = 2;
    double headway = 30.0;              // min between same-direction departures
    double first_departure = 10.0;      // min, first run offset
    double line_stagger = 3.0;          // min, extra offset per line so transfers can exist
    int fleet = 0;                      // 0 = unlimited (one bus per customer)
    int n_depots = 2;
    double init_soc_fraction = 1.0;     // of battery capacity, clamped to [E_min, E_max]
    double transit_speed_kmh = 50.0;
    double bus_speed_kmh = 25.0;
    Params params;
};

// Deterministic per seed; the same seed yields identical customer data across
// layout/fleet variations (requests are drawn before anything else).
Instance generate(const GeneratorConfig& cfg, std::uint64_t seed);

// Depot/charger/station coordinate templates, exposed for documentation.
std::vector<Point> layout_depots(const GeneratorConfig& cfg);
std::vector<std::vector<Point>> layout_lines(const GeneratorConfig& cfg);

struct SweepSpec {
    std::string axis;  // phi | lambda2 | gamma | fleet | bus_speed | init_soc | headway | n_lines
    std::vector<double> values;
    int runs = 1;
    int jobs = 1;
};

// One-factor experiment harness: per axis value, the base instance is
// regenerated with only that parameter changed and solved `runs` times.
// Output: CSV with one row per (value, run).
std::string sweep(const GeneratorConfig& base, std::uint64_t instance_seed,
                  const SearchConfig& search, const SweepSpec& spec);

GeneratorConfig apply_axis(const GeneratorConfig& base, const std::string& axis, double value);

}  // namespace eidarp
