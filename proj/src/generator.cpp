#include "eidarp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "eidarp/rng.hpp"
#include "eidarp/transit.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eidarp {

std::vector<Point> layout_depots(const GeneratorConfig& cfg) {
    const double a = cfg.area;
    std::vector<Point> out;
    if (cfg.n_depots >= 1) out.push_back({0.25 * a, 0.25 * a});
    if (cfg.n_depots >= 2) out.push_back({0.75 * a, 0.75 * a});
    for (int d = 2; d < cfg.n_depots; ++d)
        out.push_back({a * (d + 1.0) / (cfg.n_depots + 1.0), 0.25 * a});
    return out;
}

std::vector<std::vector<Point>> layout_lines(const GeneratorConfig& cfg) {
    const double a = cfg.area;
    const Point c{0.5 * a, 0.5 * a};
    std::vector<std::vector<Point>> lines;
    int n_lines = 0;
    if (cfg.layout == "none") n_lines = 0;
    else if (cfg.layout == "one") n_lines = 1;
    else if (cfg.layout == "two") n_lines = 2;
    else if (cfg.layout == "three") n_lines = 3;
    else if (cfg.layout == "four") n_lines = 4;
    else throw std::runtime_error("unknown layout: " + cfg.layout);
    if (n_lines >= 1) lines.push_back({{0.0, c.y}, c, {a, c.y}});          // horizontal
    if (n_lines >= 2) lines.push_back({{c.x, 0.0}, c, {c.x, a}});          // vertical
    if (n_lines >= 3) lines.push_back({{0.0, 0.0}, c, {a, a}});            // diagonal
    if (n_lines >= 4) lines.push_back({{0.0, a}, c, {a, 0.0}});            // anti-diagonal
    return lines;
}

Instance generate(const GeneratorConfig& cfg, std::uint64_t seed) {
    Instance inst;
    inst.params = cfg.params;
    inst.rng_seed = seed;
    Rng rng(seed);

    const double bus_speed = cfg.bus_speed_kmh / 60.0;
    const double transit_speed = cfg.transit_speed_kmh / 60.0;
    const double width = cfg.params.tw_width;
    const int n_outbound = static_cast<int>(std::lround(cfg.n * cfg.outbound_fraction));

    // Requests first so that every other knob leaves the demand unchanged.
    // Windows are placed on the bus-feasible part of the horizon: a bus must
    // be able to reach the origin from some depot and return afterwards.
    const auto depots = layout_depots(cfg);
    for (int i = 0; i < cfg.n; ++i) {
        Request r;
        r.id = i;
        r.origin = {rng.uniform(0.0, cfg.area), rng.uniform(0.0, cfg.area)};
        r.destination = {rng.uniform(0.0, cfg.area), rng.uniform(0.0, cfg.area)};
        const double direct = bus_travel_time(r.origin, r.destination, bus_speed);
        double access = std::numeric_limits<double>::infinity();
        double egress = std::numeric_limits<double>::infinity();
        for (const auto& d : depots) {
            access = std::min(access, bus_travel_time(d, r.origin, bus_speed));
            egress = std::min(egress, bus_travel_time(r.destination, d, bus_speed));
        }
        if (i < n_outbound) {
            r.origin_given = true;
            const double lo = access;
            const double hi = std::max(lo, cfg.params.t_end - width - direct - egress);
            const double e = rng.uniform(lo, hi);
            r.origin_tw = TimeWindow{e, e + width};
        } else {
            r.origin_given = false;
            const double lo = access + direct;
            const double hi = std::max(lo, cfg.params.t_end - width - egress);
            const double e = rng.uniform(lo, hi);
            r.dest_tw = TimeWindow{e, e + width};
        }
        inst.requests.push_back(r);
    }

    inst.depots = layout_depots(cfg);
    for (std::size_t d = 0; d < inst.depots.size(); ++d) {
        Charger c;
        c.id = static_cast<int>(d);
        c.location = inst.depots[d];
        c.power = 0.83;  // DC fast charger, kWh/min
        inst.chargers.push_back(c);
    }

    struct BusType {
        int capacity;
        double battery;
        double consumption;
    };
    const BusType types[2] = {{15, 69.0, 0.552}, {22, 103.5, 0.828}};
    const int fleet = cfg.fleet > 0 ? cfg.fleet : cfg.n;
    for (int k = 0; k < fleet; ++k) {
        const BusType& t = types[k % 2];
        Bus b;
        b.id = k;
        b.type_id = k % 2;
        b.capacity = t.capacity;
        b.consumption = t.consumption;
        b.battery_capacity = t.battery;
        b.e_min = 0.1 * t.battery;
        b.e_max = 0.8 * t.battery;
        b.e_init = std::clamp(cfg.init_soc_fraction * t.battery, b.e_min, b.e_max);
        b.origin_depot = k % static_cast<int>(inst.depots.size());
        b.dest_depot = b.origin_depot;
        b.speed = bus_speed;
        inst.buses.push_back(b);
    }

    const auto line_points = layout_lines(cfg);
    for (std::size_t li = 0; li < line_points.size(); ++li) {
        TransitLine line;
        line.id = static_cast<int>(li);
        line.stations = line_points[li];
        line.speed = transit_speed;
        line.dwell = 0.0;
        std::vector<double> leg_times;
        for (std::size_t s = 1; s < line.stations.size(); ++s)
            leg_times.push_back(distance_km(line.stations[s - 1], line.stations[s]) / transit_speed);
        for (int rev = 0; rev < 2; ++rev) {
            for (int d = 0; d < cfg.departures_per_direction; ++d) {
                TransitRun run;
                run.reverse = rev == 1;
                double t = cfg.first_departure + li * cfg.line_stagger + d * cfg.headway;
                run.times.push_back(t);
                for (std::size_t s = 0; s < leg_times.size(); ++s) {
                    const std::size_t leg = run.reverse ? leg_times.size() - 1 - s : s;
                    t += leg_times[leg];
                    run.times.push_back(t);
                }
                line.runs.push_back(run);
            }
        }
        inst.lines.push_back(line);
    }

    inst.finalize();
    return inst;
}

GeneratorConfig apply_axis(const GeneratorConfig& base, const std::string& axis, double value) {
    GeneratorConfig cfg = base;
    if (axis == "phi") cfg.params.phi = value;
    else if (axis == "lambda2") cfg.params.lambda2 = value;
    else if (axis == "gamma") cfg.params.gamma = value;
    else if (axis == "fleet") cfg.fleet = static_cast<int>(std::lround(value));
    else if (axis == "bus_speed") cfg.bus_speed_kmh = value;
    else if (axis == "init_soc") cfg.init_soc_fraction = value;
    else if (axis == "headway") cfg.headway = value;
    else if (axis == "n_lines") {
        const int v = static_cast<int>(std::lround(value));
        const char* names[5] = {"none", "one", "two", "three", "four"};
        if (v < 0 || v > 4) throw std::runtime_error("n_lines must be 0..4");
        cfg.layout = names[v];
    } else {
        throw std::runtime_error("unknown sweep axis: " + axis);
    }
    return cfg;
}

std::string sweep(const GeneratorConfig& base, std::uint64_t instance_seed,
                  const SearchConfig& search, const SweepSpec& spec) {
    struct Cell {
        double value;
        int run;
        KpiReport kpi;
    };
    std::vector<std::pair<double, int>> tasks;
    for (double v : spec.values)
        for (int run = 0; run < std::max(1, spec.runs); ++run) tasks.emplace_back(v, run);
    std::vector<Cell> cells(tasks.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, spec.jobs)) if (spec.jobs > 1)
#endif
    for (int t = 0; t < static_cast<int>(tasks.size()); ++t) {
        const auto [value, run] = tasks[static_cast<std::size_t>(t)];
        const GeneratorConfig cfg = apply_axis(base, spec.axis, value);
        const Instance inst = generate(cfg, instance_seed);
        const ExpandedTransitGraph graph = build_transit_graph(inst, spec.jobs <= 1);
        SearchConfig sc = search;
        sc.seed = search.seed + static_cast<std::uint64_t>(run);
        SearchResult res = run_search(inst, graph, sc);
        KpiReport kpi = compute_kpis(inst, graph, res.best);
        kpi.runtime_s = res.runtime_s;
        cells[static_cast<std::size_t>(t)] = {value, run, kpi};
    }

    std::ostringstream os;
    os << "axis,value,run," << kpi_csv_header() << "\n";
    for (const auto& c : cells)
        os << spec.axis << ',' << c.value << ',' << c.run << ',' << kpi_csv_row(c.kpi) << "\n";
    return os.str();
}

}  // namespace eidarp
