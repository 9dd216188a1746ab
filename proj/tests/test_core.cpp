#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eidarp/generator.hpp"
#include "eidarp/io.hpp"
#include "eidarp/rng.hpp"
#include "test_support.hpp"

using namespace eidarp;

TEST_CASE("bus travel time basics") {
    CHECK(bus_travel_time({3.0, 4.0}, {3.0, 4.0}, 1.0) == doctest::Approx(0.0));
    // 10 km at 25 km/h is 24 minutes
    CHECK(bus_travel_time({0.0, 0.0}, {0.0, 10.0}, 25.0 / 60.0) == doctest::Approx(24.0));
}

TEST_CASE("travel time satisfies the triangle inequality") {
    Rng rng(7);
    for (int t = 0; t < 500; ++t) {
        const Point a{rng.uniform(0, 16), rng.uniform(0, 16)};
        const Point b{rng.uniform(0, 16), rng.uniform(0, 16)};
        const Point c{rng.uniform(0, 16), rng.uniform(0, 16)};
        const double s = 25.0 / 60.0;
        CHECK(bus_travel_time(a, c, s) <=
              bus_travel_time(a, b, s) + bus_travel_time(b, c, s) + 1e-9);
        CHECK(bus_travel_time(a, b, s) == doctest::Approx(bus_travel_time(b, a, s)));
    }
}

TEST_CASE("time window derivation") {
    Params p;
    p.t_end = 200.0;
    p.phi = 1.5;

    SUBCASE("origin window given") {
        Request r;
        r.origin_given = true;
        r.origin_tw = TimeWindow{30.0, 45.0};
        r.direct_bus_time = 20.0;
        r.max_travel_time = 30.0;
        derive_time_windows(r, p);
        CHECK(r.dtw().e == doctest::Approx(50.0));
        CHECK(r.dtw().l == doctest::Approx(75.0));
        CHECK_FALSE(r.bus_window_empty);
    }
    SUBCASE("destination window given") {
        Request r;
        r.origin_given = false;
        r.dest_tw = TimeWindow{100.0, 115.0};
        r.direct_bus_time = 40.0;
        r.max_travel_time = 60.0;
        derive_time_windows(r, p);
        CHECK(r.otw().e == doctest::Approx(40.0));
        CHECK(r.otw().l == doctest::Approx(75.0));
    }
    SUBCASE("clipped-empty window flags the request") {
        Request r;
        r.origin_given = false;
        r.dest_tw = TimeWindow{5.0, 20.0};
        r.direct_bus_time = 40.0;
        r.max_travel_time = 60.0;
        derive_time_windows(r, p);
        CHECK(r.bus_window_empty);
    }
}

TEST_CASE("both windows populated and ordered after load") {
    const Instance inst = generate(GeneratorConfig{}, 5);
    for (const auto& r : inst.requests) {
        REQUIRE(r.origin_tw.has_value());
        REQUIRE(r.dest_tw.has_value());
        CHECK(r.otw().e <= r.otw().l + kEpsTime);
        CHECK(r.dtw().e <= r.dtw().l + kEpsTime);
        CHECK(r.max_travel_time == doctest::Approx(r.direct_bus_time * inst.params.phi));
    }
}

TEST_CASE("instance serialization round-trips bit-exactly") {
    GeneratorConfig cfg;
    cfg.n = 12;
    cfg.init_soc_fraction = 0.3;
    const Instance inst = generate(cfg, 11);
    const std::string once = instance_to_json_text(inst);
    const Instance back = instance_from_json_text(once);
    const std::string twice = instance_to_json_text(back);
    CHECK(once == twice);
}

TEST_CASE("params invariants rejected") {
    Params p;
    p.phi = 0.5;
    CHECK_THROWS(p.validate());
    p = Params{};
    p.xi_max = 1.0;
    CHECK_THROWS(p.validate());
    p = Params{};
    p.eta_min = 11.0;
    p.eta_max = 10.0;
    CHECK_THROWS(p.validate());
}
