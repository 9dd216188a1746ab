#include "eidarp/instance.hpp"

#include <algorithm>
#include <cmath>

namespace eidarp {

double bus_travel_time(const Point& a, const Point& b, double speed_km_min) {
    return travel_time_min(a, b, speed_km_min);
}

void derive_time_windows(Request& r, const Params& params) {
    const double direct = r.direct_bus_time;
    const double lmax = r.max_travel_time;
    auto clip = [&](TimeWindow tw) {
        tw.e = std::max(0.0, tw.e);
        tw.l = std::min(params.t_end, tw.l);
        return tw;
    };
    if (r.origin_given) {
        if (!r.origin_tw) throw std::runtime_error("request: origin window marked given but missing");
        r.dest_tw = clip({r.otw().e + direct, r.otw().l + lmax});
        r.bus_window_empty = r.dtw().empty();
    } else {
        if (!r.dest_tw) throw std::runtime_error("request: destination window marked given but missing");
        r.origin_tw = clip({r.dtw().e - lmax, r.dtw().l - direct});
        r.bus_window_empty = r.otw().empty();
    }
}

void Instance::finalize() {
    params.validate();
    const double speed = ref_bus_speed();
    for (auto& r : requests) {
        r.direct_bus_time = bus_travel_time(r.origin, r.destination, speed);
        r.max_travel_time = r.direct_bus_time * params.phi;
        derive_time_windows(r, params);
    }
    validate();
}

void Instance::validate() const {
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const auto& r = requests[i];
        if (r.id != static_cast<int>(i))
            throw std::runtime_error("instance: request ids must be 0..n-1 in order");
        if (!r.origin_tw || !r.dest_tw)
            throw std::runtime_error("instance: request " + std::to_string(r.id) + " missing window");
    }
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const auto& b = buses[i];
        if (b.id != static_cast<int>(i))
            throw std::runtime_error("instance: bus ids must be 0..K-1 in order");
        if (b.capacity < 1) throw std::runtime_error("instance: bus capacity must be >= 1");
        if (!(b.e_min <= b.e_init + kEpsEnergy && b.e_init <= b.e_max + kEpsEnergy &&
              b.e_max <= b.battery_capacity + kEpsEnergy))
            throw std::runtime_error("instance: bus " + std::to_string(b.id) +
                                     " violates E_min <= E_init <= E_max <= battery");
        if (b.origin_depot < 0 || b.origin_depot >= static_cast<int>(depots.size()) ||
            b.dest_depot < 0 || b.dest_depot >= static_cast<int>(depots.size()))
            throw std::runtime_error("instance: bus " + std::to_string(b.id) + " references unknown depot");
        if (b.speed <= 0.0) throw std::runtime_error("instance: bus speed must be > 0");
    }
    for (std::size_t i = 0; i < chargers.size(); ++i) {
        if (chargers[i].id != static_cast<int>(i))
            throw std::runtime_error("instance: charger ids must be 0..C-1 in order");
        if (chargers[i].power <= 0.0) throw std::runtime_error("instance: charger power must be > 0");
    }
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& line = lines[li];
        if (line.id != static_cast<int>(li))
            throw std::runtime_error("instance: line ids must be 0..L-1 in order");
        if (line.stations.size() < 2)
            throw std::runtime_error("instance: transit line needs >= 2 stations");
        if (line.dwell < 0.0) throw std::runtime_error("instance: dwell must be >= 0");
        for (const auto& run : line.runs) {
            if (run.times.size() != line.stations.size())
                throw std::runtime_error("instance: run must list one departure per station");
            for (std::size_t k = 1; k < run.times.size(); ++k)
                if (run.times[k] <= run.times[k - 1])
                    throw std::runtime_error("instance: run departure times must strictly increase");
        }
    }
}

namespace {

std::vector<Point> all_bus_points(const Instance& inst) {
    std::vector<Point> pts;
    for (const auto& r : inst.requests) {
        pts.push_back(r.origin);
        pts.push_back(r.destination);
    }
    for (const auto& d : inst.depots) pts.push_back(d);
    for (const auto& c : inst.chargers) pts.push_back(c.location);
    for (const auto& l : inst.lines)
        for (const auto& s : l.stations) pts.push_back(s);
    return pts;
}

}  // namespace

double Instance::max_arc_distance() const {
    const auto pts = all_bus_points(*this);
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, distance_km(pts[i], pts[j]));
    return best;
}

double Instance::mean_arc_distance() const {
    const auto pts = all_bus_points(*this);
    if (pts.size() < 2) return 0.0;
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            total += distance_km(pts[i], pts[j]);
            ++count;
        }
    return total / static_cast<double>(count);
}

}  // namespace eidarp
