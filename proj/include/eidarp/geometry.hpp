#pragma once

#include <cmath>

namespace eidarp {

struct Point {
    double x = 0.0;  // km
    double y = 0.0;  // km

    bool operator==(const Point& o) const { return x == o.x && y == o.y; }
};

inline double distance_km(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline bool same_location(const Point& a, const Point& b, double tol = 1e-9) {
    return distance_km(a, b) <= tol;
}

// speed in km/min, result in minutes. Euclidean metric, so symmetry and the
// triangle inequality hold.
inline double travel_time_min(const Point& a, const Point& b, double speed) {
    return distance_km(a, b) / speed;
}

// Comparisons on times use this tolerance (minutes).
inline constexpr double kEpsTime = 1e-6;
inline constexpr double kEpsEnergy = 1e-9;

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace eidarp
