#include "eidarp/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace eidarp {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

namespace {

Json point_to_json(const Point& p) { return Json::array({p.x, p.y}); }

Point point_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw std::runtime_error("point must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json params_to_json(const Params& p) {
    Json j;
    j["lambda1"] = p.lambda1;
    j["lambda2"] = p.lambda2;
    j["omega"] = p.omega;
    j["phi"] = p.phi;
    j["gamma"] = p.gamma;
    j["eta_min"] = p.eta_min;
    j["eta_max"] = p.eta_max;
    j["max_walk_dist"] = p.max_walk_dist;
    j["walk_speed"] = p.walk_speed;
    j["service_time"] = p.service_time;
    j["charge_service_time"] = p.charge_service_time;
    j["t_end"] = p.t_end;
    j["tw_width"] = p.tw_width;
    j["n_iter"] = p.n_iter;
    j["t_max_factor"] = p.t_max_factor;
    j["t_red"] = p.t_red;
    j["xi_max"] = p.xi_max;
    j["alpha_ls"] = p.alpha_ls;
    return j;
}

Params params_from_json(const Json& j) {
    Params p;
    auto get = [&](const char* key, double& field) {
        if (j.contains(key)) field = j.at(key).get<double>();
    };
    get("lambda1", p.lambda1);
    get("lambda2", p.lambda2);
    get("omega", p.omega);
    get("phi", p.phi);
    get("gamma", p.gamma);
    get("eta_min", p.eta_min);
    get("eta_max", p.eta_max);
    get("max_walk_dist", p.max_walk_dist);
    get("walk_speed", p.walk_speed);
    get("service_time", p.service_time);
    get("charge_service_time", p.charge_service_time);
    get("t_end", p.t_end);
    get("tw_width", p.tw_width);
    if (j.contains("n_iter")) p.n_iter = j.at("n_iter").get<int>();
    get("t_max_factor", p.t_max_factor);
    get("t_red", p.t_red);
    get("xi_max", p.xi_max);
    get("alpha_ls", p.alpha_ls);
    return p;
}

}  // namespace

std::string instance_to_json_text(const Instance& inst) {
    Json j;
    j["params"] = params_to_json(inst.params);
    j["seed"] = inst.rng_seed;
    j["requests"] = Json::array();
    for (const auto& r : inst.requests) {
        Json rq;
        rq["id"] = r.id;
        rq["origin"] = point_to_json(r.origin);
        rq["destination"] = point_to_json(r.destination);
        if (r.origin_given)
            rq["origin_tw"] = Json::array({r.otw().e, r.otw().l});
        else
            rq["dest_tw"] = Json::array({r.dtw().e, r.dtw().l});
        j["requests"].push_back(rq);
    }
    j["buses"] = Json::array();
    for (const auto& b : inst.buses) {
        Json bj;
        bj["id"] = b.id;
        bj["type"] = b.type_id;
        bj["capacity"] = b.capacity;
        bj["consumption"] = b.consumption;
        bj["battery"] = b.battery_capacity;
        bj["e_min"] = b.e_min;
        bj["e_max"] = b.e_max;
        bj["e_init"] = b.e_init;
        bj["origin_depot"] = b.origin_depot;
        bj["dest_depot"] = b.dest_depot;
        bj["speed"] = b.speed;
        j["buses"].push_back(bj);
    }
    j["depots"] = Json::array();
    for (const auto& d : inst.depots) j["depots"].push_back(point_to_json(d));
    j["chargers"] = Json::array();
    for (const auto& c : inst.chargers) {
        Json cj;
        cj["id"] = c.id;
        cj["location"] = point_to_json(c.location);
        cj["power"] = c.power;
        j["chargers"].push_back(cj);
    }
    j["lines"] = Json::array();
    for (const auto& l : inst.lines) {
        Json lj;
        lj["id"] = l.id;
        lj["stations"] = Json::array();
        for (const auto& s : l.stations) lj["stations"].push_back(point_to_json(s));
        lj["runs"] = Json::array();
        for (const auto& run : l.runs) {
            Json rj;
            rj["reverse"] = run.reverse;
            rj["times"] = run.times;
            lj["runs"].push_back(rj);
        }
        lj["speed"] = l.speed;
        lj["dwell"] = l.dwell;
        j["lines"].push_back(lj);
    }
    return j.dump(2) + "\n";
}

Instance instance_from_json_text(const std::string& text) {
    Json j = Json::parse(text);
    Instance inst;
    if (j.contains("params")) inst.params = params_from_json(j.at("params"));
    if (j.contains("seed")) inst.rng_seed = j.at("seed").get<std::uint64_t>();
    for (const auto& rq : j.value("requests", Json::array())) {
        Request r;
        r.id = rq.at("id").get<int>();
        r.origin = point_from_json(rq.at("origin"));
        r.destination = point_from_json(rq.at("destination"));
        const bool has_o = rq.contains("origin_tw");
        const bool has_d = rq.contains("dest_tw");
        if (has_o == has_d)
            throw std::runtime_error("request " + std::to_string(r.id) +
                                     ": exactly one of origin_tw/dest_tw must be given");
        if (has_o) {
            r.origin_given = true;
            r.origin_tw = TimeWindow{rq.at("origin_tw")[0].get<double>(), rq.at("origin_tw")[1].get<double>()};
        } else {
            r.origin_given = false;
            r.dest_tw = TimeWindow{rq.at("dest_tw")[0].get<double>(), rq.at("dest_tw")[1].get<double>()};
        }
        inst.requests.push_back(r);
    }
    for (const auto& bj : j.value("buses", Json::array())) {
        Bus b;
        b.id = bj.at("id").get<int>();
        b.type_id = bj.value("type", 0);
        b.capacity = bj.at("capacity").get<int>();
        b.consumption = bj.at("consumption").get<double>();
        b.battery_capacity = bj.at("battery").get<double>();
        b.e_min = bj.at("e_min").get<double>();
        b.e_max = bj.at("e_max").get<double>();
        b.e_init = bj.at("e_init").get<double>();
        b.origin_depot = bj.at("origin_depot").get<int>();
        b.dest_depot = bj.at("dest_depot").get<int>();
        b.speed = bj.at("speed").get<double>();
        inst.buses.push_back(b);
    }
    for (const auto& dj : j.value("depots", Json::array())) inst.depots.push_back(point_from_json(dj));
    for (const auto& cj : j.value("chargers", Json::array())) {
        Charger c;
        c.id = cj.at("id").get<int>();
        c.location = point_from_json(cj.at("location"));
        c.power = cj.at("power").get<double>();
        inst.chargers.push_back(c);
    }
    for (const auto& lj : j.value("lines", Json::array())) {
        TransitLine l;
        l.id = lj.at("id").get<int>();
        for (const auto& s : lj.at("stations")) l.stations.push_back(point_from_json(s));
        for (const auto& rj : lj.at("runs")) {
            TransitRun run;
            run.reverse = rj.value("reverse", false);
            run.times = rj.at("times").get<std::vector<double>>();
            l.runs.push_back(run);
        }
        l.speed = lj.value("speed", 50.0 / 60.0);
        l.dwell = lj.value("dwell", 0.0);
        inst.lines.push_back(l);
    }
    inst.finalize();
    return inst;
}

Instance load_instance(const std::string& path) { return instance_from_json_text(read_file(path)); }

void save_instance(const Instance& inst, const std::string& path) {
    write_file(path, instance_to_json_text(inst));
}

namespace {

const char* kind_name(StopKind k) {
    switch (k) {
        case StopKind::DepotStart: return "depot_start";
        case StopKind::Pickup: return "pickup";
        case StopKind::Dropoff: return "dropoff";
        case StopKind::Transit: return "transit";
        case StopKind::Charger: return "charger";
        case StopKind::DepotEnd: return "depot_end";
    }
    return "?";
}

StopKind kind_from_name(const std::string& s) {
    if (s == "depot_start") return StopKind::DepotStart;
    if (s == "pickup") return StopKind::Pickup;
    if (s == "dropoff") return StopKind::Dropoff;
    if (s == "transit") return StopKind::Transit;
    if (s == "charger") return StopKind::Charger;
    if (s == "depot_end") return StopKind::DepotEnd;
    throw std::runtime_error("unknown stop kind: " + s);
}

const char* mode_name(LegMode m) {
    switch (m) {
        case LegMode::None: return "none";
        case LegMode::Walk: return "walk";
        case LegMode::Bus: return "bus";
    }
    return "?";
}

LegMode mode_from_name(const std::string& s) {
    if (s == "none") return LegMode::None;
    if (s == "walk") return LegMode::Walk;
    if (s == "bus") return LegMode::Bus;
    throw std::runtime_error("unknown leg mode: " + s);
}

}  // namespace

std::string solution_to_json_text(const Instance& inst, const ExpandedTransitGraph& graph,
                                  const Solution& sol) {
    Json j;
    j["seed"] = sol.seed;
    j["objective"] = sol.objective_cache;
    j["routes"] = Json::array();
    for (const auto& r : sol.routes) {
        if (!r.used()) continue;
        Json rj;
        rj["bus"] = r.bus;
        rj["stops"] = Json::array();
        for (std::size_t p = 0; p < r.stops.size(); ++p) {
            const Stop& s = r.stops[p];
            Json sj;
            sj["kind"] = kind_name(s.kind);
            sj["ref"] = s.ref;
            if (!s.board.empty()) sj["board"] = s.board;
            if (!s.alight.empty()) sj["alight"] = s.alight;
            if (s.kind == StopKind::Charger) {
                sj["charge_start"] = s.charge_start;
                sj["charge_duration"] = s.charge_duration;
            }
            sj["A"] = r.sched.A[p];
            sj["B"] = r.sched.B[p];
            sj["W"] = r.sched.W[p];
            sj["D"] = r.sched.D[p];
            sj["q"] = r.sched.q[p];
            rj["stops"].push_back(sj);
        }
        rj["f_delay"] = r.sched.f_delay;
        j["routes"].push_back(rj);
    }
    j["journeys"] = Json::array();
    for (const auto& jn : sol.journeys) {
        if (!jn.served()) continue;
        Json q;
        q["request"] = jn.request;
        q["option"] = jn.option;
        if (jn.tp >= 0) {
            q["tp_entry"] = graph.tps[static_cast<std::size_t>(jn.tp)].entry;
            q["tp_exit"] = graph.tps[static_cast<std::size_t>(jn.tp)].exit;
        }
        q["first_mode"] = mode_name(jn.first_mode);
        q["last_mode"] = mode_name(jn.last_mode);
        if (jn.first_bus >= 0) q["first_bus"] = jn.first_bus;
        if (jn.last_bus >= 0) q["last_bus"] = jn.last_bus;
        q["legs"] = Json::array({jn.first_time, jn.transit_time, jn.last_time, jn.walk_time});
        q["dep"] = jn.dep;
        q["arr"] = jn.arr;
        j["journeys"].push_back(q);
    }
    j["rejected"] = sol.rejected();
    Json kj;
    const KpiReport k = compute_kpis(inst, graph, sol);
    kj["BTT"] = k.btt;
    kj["RT"] = k.rt;
    kj["CTT"] = k.ctt;
    kj["CTT_transit"] = k.ctt_transit;
    kj["CTT_bus"] = k.ctt_bus;
    kj["CTT_walk"] = k.ctt_walk;
    kj["WT"] = k.wt;
    kj["n_cus_transit"] = k.n_cus_transit;
    kj["n_used_buses"] = k.n_used_buses;
    kj["cus_per_bus"] = k.cus_per_bus;
    kj["n_reject"] = k.n_reject;
    kj["n_TO4"] = k.n_to4;
    j["kpis"] = kj;
    return j.dump(2) + "\n";
}

void save_solution(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol,
                   const std::string& path) {
    write_file(path, solution_to_json_text(inst, graph, sol));
}

Solution solution_from_json_text(const Instance& inst, const ExpandedTransitGraph& graph,
                                 const std::string& text) {
    Json j = Json::parse(text);
    Solution sol = make_empty_solution(inst);
    sol.seed = j.value("seed", 0ULL);
    sol.objective_cache = j.value("objective", 0.0);
    for (const auto& rj : j.value("routes", Json::array())) {
        const int bus = rj.at("bus").get<int>();
        if (bus < 0 || bus >= static_cast<int>(sol.routes.size()))
            throw std::runtime_error("solution references unknown bus " + std::to_string(bus));
        Route& r = sol.routes[static_cast<std::size_t>(bus)];
        r.stops.clear();
        const auto& stops = rj.at("stops");
        r.sched.resize(stops.size());
        std::size_t p = 0;
        for (const auto& sj : stops) {
            Stop s;
            s.kind = kind_from_name(sj.at("kind").get<std::string>());
            s.ref = sj.at("ref").get<int>();
            if (sj.contains("board")) s.board = sj.at("board").get<std::vector<int>>();
            if (sj.contains("alight")) s.alight = sj.at("alight").get<std::vector<int>>();
            if (s.kind == StopKind::Charger) {
                s.charge_start = sj.at("charge_start").get<double>();
                s.charge_duration = sj.at("charge_duration").get<double>();
                sol.calendars[static_cast<std::size_t>(s.ref)].insert(
                    {bus, s.charge_start, s.charge_start + s.charge_duration});
            }
            r.stops.push_back(s);
            r.sched.A[p] = sj.at("A").get<double>();
            r.sched.B[p] = sj.at("B").get<double>();
            r.sched.W[p] = sj.at("W").get<double>();
            r.sched.D[p] = sj.at("D").get<double>();
            r.sched.q[p] = sj.at("q").get<int>();
            ++p;
        }
        r.sched.f_delay = rj.value("f_delay", false);
    }
    for (const auto& q : j.value("journeys", Json::array())) {
        const int rid = q.at("request").get<int>();
        Journey& jn = sol.journeys[static_cast<std::size_t>(rid)];
        jn.request = rid;
        jn.option = q.at("option").get<int>();
        if (q.contains("tp_entry")) {
            jn.tp = graph.tp_index(q.at("tp_entry").get<int>(), q.at("tp_exit").get<int>());
            if (jn.tp < 0) throw std::runtime_error("solution references unknown transit pair");
        }
        jn.first_mode = mode_from_name(q.at("first_mode").get<std::string>());
        jn.last_mode = mode_from_name(q.at("last_mode").get<std::string>());
        jn.first_bus = q.value("first_bus", -1);
        jn.last_bus = q.value("last_bus", -1);
        const auto& legs = q.at("legs");
        jn.first_time = legs[0].get<double>();
        jn.transit_time = legs[1].get<double>();
        jn.last_time = legs[2].get<double>();
        jn.walk_time = legs[3].get<double>();
        jn.dep = q.at("dep").get<double>();
        jn.arr = q.at("arr").get<double>();
    }
    return sol;
}

Solution load_solution(const Instance& inst, const ExpandedTransitGraph& graph,
                       const std::string& path) {
    return solution_from_json_text(inst, graph, read_file(path));
}

}  // namespace eidarp
