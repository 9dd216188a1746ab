#include "eidarp/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eidarp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StopMeta {
    Point loc;
    double mu = 0.0;
    double e = -kInf;
    double l = kInf;
    int dq = 0;
    bool firstmile = false;  // customers leave the bus for a train here
    bool board = false;      // customers join the bus off a train here
    double theta_dep = 0.0;
    double theta_arr = 0.0;
    double extra_stay = 0.0;  // charging duration
    bool zero_load = false;   // load must be zero after serving (charger/depot)
};

std::vector<StopMeta> build_meta(const Route& route, const EvalContext& ctx) {
    const Instance& inst = *ctx.inst;
    std::vector<StopMeta> meta(route.stops.size());
    for (std::size_t p = 0; p < route.stops.size(); ++p) {
        const Stop& s = route.stops[p];
        StopMeta& m = meta[p];
        m.loc = stop_location(inst, *ctx.graph, s);
        m.mu = stop_service_time(inst, s);
        switch (s.kind) {
            case StopKind::DepotStart:
            case StopKind::DepotEnd:
                m.e = 0.0;
                m.l = inst.params.t_end;
                m.zero_load = true;
                break;
            case StopKind::Pickup: {
                const auto& tw = inst.requests[static_cast<std::size_t>(s.ref)].otw();
                m.e = tw.e;
                m.l = tw.l;
                m.dq = +1;
                break;
            }
            case StopKind::Dropoff: {
                const auto& tw = inst.requests[static_cast<std::size_t>(s.ref)].dtw();
                m.e = tw.e;
                m.l = tw.l;
                m.dq = -1;
                break;
            }
            case StopKind::Transit: {
                const auto& node = ctx.graph->node(s.ref);
                m.theta_dep = node.theta_dep;
                m.theta_arr = node.theta_arr;
                m.firstmile = !s.alight.empty();
                m.board = !s.board.empty();
                m.dq = static_cast<int>(s.board.size()) - static_cast<int>(s.alight.size());
                if (m.board) {
                    m.e = node.theta_arr;
                    m.l = node.theta_arr + inst.params.gamma;
                }
                break;
            }
            case StopKind::Charger: {
                // Service start is pinned to the booked hookup slot.
                const double hookup = s.charge_start - inst.params.charge_service_time;
                m.e = hookup;
                m.l = hookup;
                m.extra_stay = s.charge_duration;
                m.zero_load = true;
                break;
            }
        }
    }
    return meta;
}

struct Pass {
    bool ok = true;
    int fail_stop = -1;
    std::string reason;
};

double leg_time(const Instance& inst, const Route& route, const std::vector<StopMeta>& meta,
                std::size_t a, std::size_t b) {
    const double speed = inst.buses[static_cast<std::size_t>(route.bus)].speed;
    return bus_travel_time(meta[a].loc, meta[b].loc, speed);
}

// Forward recurrence from stop `from`; hard checks on windows, capacity, and
// transit departure synchronization.
Pass propagate(Route& route, const EvalContext& ctx, const std::vector<StopMeta>& meta,
               std::size_t from) {
    const Instance& inst = *ctx.inst;
    const int cap = inst.buses[static_cast<std::size_t>(route.bus)].capacity;
    Sched& sc = route.sched;
    Pass pass;
    for (std::size_t p = from; p < route.stops.size(); ++p) {
        const StopMeta& m = meta[p];
        if (p == 0) {
            sc.A[0] = sc.D[0];
            sc.B[0] = sc.D[0];
            sc.W[0] = 0.0;
            sc.q[0] = 0;
            continue;
        }
        sc.A[p] = sc.D[p - 1] + leg_time(inst, route, meta, p - 1, p);
        sc.B[p] = std::max(sc.A[p], m.e == -kInf ? sc.A[p] : m.e);
        sc.W[p] = sc.B[p] - sc.A[p];
        sc.D[p] = sc.B[p] + m.mu + m.extra_stay;
        sc.q[p] = sc.q[p - 1] + m.dq;
        if (sc.q[p] > cap) {
            pass = {false, static_cast<int>(p), "capacity exceeded"};
            return pass;
        }
        if (m.zero_load && sc.q[p] != 0) {
            pass = {false, static_cast<int>(p), "passengers on board at depot/charger"};
            return pass;
        }
        if (m.l != kInf && sc.B[p] > m.l + kEpsTime) {
            pass = {false, static_cast<int>(p), "time window violated"};
            return pass;
        }
        if (m.firstmile && sc.A[p] > m.theta_dep + kEpsTime) {
            pass = {false, static_cast<int>(p), "arrived after transit departure"};
            return pass;
        }
    }
    return pass;
}

void recompute_rho(Route& route, const EvalContext& ctx, const std::vector<StopMeta>& meta) {
    const double gamma = ctx.inst->params.gamma;
    for (std::size_t p = 0; p < route.stops.size(); ++p)
        route.sched.rho[p] =
            meta[p].firstmile ? pos_part(meta[p].theta_dep - gamma - route.sched.A[p]) : 0.0;
}

double rho_sum(const Route& route) {
    double s = 0.0;
    for (double v : route.sched.rho) s += v;
    return s;
}

// Requests whose travel time must be checked on this route, with the stop
// establishing the check (their destination here, or their presence when the
// destination lives elsewhere).
std::vector<int> requests_on_route(const Route& route) {
    std::vector<int> reqs;
    auto add = [&](int r) {
        if (std::find(reqs.begin(), reqs.end(), r) == reqs.end()) reqs.push_back(r);
    };
    for (const auto& s : route.stops) {
        if (s.kind == StopKind::Pickup || s.kind == StopKind::Dropoff) add(s.ref);
        for (int r : s.board) add(r);
        for (int r : s.alight) add(r);
    }
    return reqs;
}

struct TravelCheck {
    bool ok = true;
    int bad_request = -1;
};

TravelCheck check_travel_times(const Route& route, const EvalContext& ctx,
                               const EndpointResolver& res) {
    for (int r : requests_on_route(route)) {
        const Journey& j = ctx.journey(r);
        if (!j.served()) continue;
        double L;
        if (!res.travel_time_of(r, L)) continue;  // option-4 last mile pending
        if (L > ctx.inst->requests[static_cast<std::size_t>(r)].max_travel_time + kEpsTime)
            return {false, r};
    }
    return {};
}

}  // namespace

const Route* EndpointResolver::route_for(int bus) const {
    if (local && local->bus == bus) return local;
    if (delayed) {
        auto it = delayed->find(bus);
        if (it != delayed->end()) return &it->second;
    }
    return &ctx->route(bus);
}

bool EndpointResolver::dep_of(int request, double& out) const {
    const Journey& j = ctx->journey(request);
    if (!j.served()) return false;
    if (j.first_mode == LegMode::Walk) {
        const auto& tp = ctx->graph->tps[static_cast<std::size_t>(j.tp)];
        const auto& entry = ctx->graph->node(tp.entry);
        const auto& req = ctx->inst->requests[static_cast<std::size_t>(request)];
        const double tw = walk_time_or_reject(req.origin, entry.location, ctx->inst->params);
        out = entry.theta_dep - std::max(tw, 0.0);
        return true;
    }
    const Route* r = route_for(j.first_bus);
    const int p = r->find_stop(StopKind::Pickup, request);
    if (p < 0 || r->sched.B.size() != r->stops.size()) return false;
    out = r->sched.B[static_cast<std::size_t>(p)];
    return true;
}

bool EndpointResolver::arr_of(int request, double& out) const {
    const Journey& j = ctx->journey(request);
    if (!j.served()) return false;
    if (j.option == 5) {
        const Route* r = route_for(j.first_bus);
        const int p = r->find_stop(StopKind::Dropoff, request);
        if (p < 0 || r->sched.B.size() != r->stops.size()) return false;
        out = r->sched.B[static_cast<std::size_t>(p)];
        return true;
    }
    if (j.last_mode == LegMode::Walk) {
        const auto& tp = ctx->graph->tps[static_cast<std::size_t>(j.tp)];
        const auto& exit = ctx->graph->node(tp.exit);
        const auto& req = ctx->inst->requests[static_cast<std::size_t>(request)];
        const double tw = walk_time_or_reject(exit.location, req.destination, ctx->inst->params);
        out = exit.theta_arr + std::max(tw, 0.0);
        return true;
    }
    if (!j.last_inserted) return false;
    const Route* r = route_for(j.last_bus);
    const int p = r->find_stop(StopKind::Dropoff, request);
    if (p < 0 || r->sched.B.size() != r->stops.size()) return false;
    out = r->sched.B[static_cast<std::size_t>(p)];
    return true;
}

bool EndpointResolver::travel_time_of(int request, double& out) const {
    double dep, arr;
    if (!dep_of(request, dep) || !arr_of(request, arr)) return false;
    out = arr - dep;
    return true;
}

double forward_slack(const Route& route, const EvalContext& ctx, int i) {
    // Schedule must be populated through the route end.
    std::vector<StopMeta> meta = build_meta(route, ctx);
    EndpointResolver res{&ctx, &route, nullptr};
    const Sched& sc = route.sched;
    const double gamma = ctx.inst->params.gamma;

    double F = kInf;
    double cum_w = 0.0;
    for (std::size_t j = static_cast<std::size_t>(i); j < route.stops.size(); ++j) {
        if (j > static_cast<std::size_t>(i)) cum_w += sc.W[j];
        const StopMeta& m = meta[j];
        const Stop& s = route.stops[j];
        double zeta = kInf;
        if (m.firstmile)
            zeta = std::min(zeta, pos_part(m.theta_dep - std::max(sc.A[j], m.theta_dep - gamma)));
        if (m.board) zeta = std::min(zeta, pos_part(m.theta_arr + gamma - sc.B[j]));
        if (s.kind == StopKind::Dropoff) {
            const auto& req = ctx.inst->requests[static_cast<std::size_t>(s.ref)];
            // The maximum-travel-time term binds only when delaying node i
            // stretches this journey: the departure happened strictly before i
            // (on this route) or is fixed elsewhere (walk leg or another bus).
            bool ride_binds = true;
            const Journey& jn = ctx.journey(s.ref);
            if (jn.served() && jn.first_mode == LegMode::Bus && jn.first_bus == route.bus) {
                const int p_dep = route.find_stop(StopKind::Pickup, s.ref);
                ride_binds = p_dep >= 0 && p_dep < i;
            }
            double cap = m.l - sc.B[j];
            double L;
            if (ride_binds && res.travel_time_of(s.ref, L))
                cap = std::min(cap, req.max_travel_time - L);
            zeta = std::min(zeta, pos_part(cap));
        } else if (m.l != kInf) {
            zeta = std::min(zeta, pos_part(m.l - sc.B[j]));
        }
        F = std::min(F, cum_w + zeta);
        if (F <= 0.0) return 0.0;
    }
    return F;
}

namespace {

// Step 7: delay departures at origin nodes and first-mile transit nodes, in
// route order, by the full forward slack (uncapped). Returns true if the
// route's success condition (all checkable L within bounds, no rho left)
// holds after some node.
bool step7(Route& route, const EvalContext& ctx, const std::vector<StopMeta>& meta,
           const std::map<int, Route>* delayed, bool check_each) {
    Sched& sc = route.sched;
    sc.f_delay = true;
    EndpointResolver res{&ctx, &route, delayed};
    for (std::size_t j = 0; j < route.stops.size(); ++j) {
        const bool origin = route.stops[j].kind == StopKind::Pickup;
        if (!origin && !meta[j].firstmile) continue;
        const double fj = forward_slack(route, ctx, static_cast<int>(j));
        if (fj > kEpsTime && std::isfinite(fj)) {
            sc.W[j] += fj;
            sc.B[j] = sc.A[j] + sc.W[j];
            sc.D[j] = sc.B[j] + meta[j].mu + meta[j].extra_stay;
            propagate(route, ctx, meta, j + 1);
            recompute_rho(route, ctx, meta);
        }
        if (check_each && rho_sum(route) <= kEpsTime && check_travel_times(route, ctx, res).ok)
            return true;
    }
    return check_each && rho_sum(route) <= kEpsTime && check_travel_times(route, ctx, res).ok;
}

}  // namespace

EvalVerdict nine_step_evaluate(Route& route, const EvalContext& ctx,
                               std::map<int, Route>* delayed_first_miles) {
    const Instance& inst = *ctx.inst;
    std::vector<StopMeta> meta = build_meta(route, ctx);
    Sched& sc = route.sched;
    sc.resize(route.stops.size());
    sc.f_delay = false;

    std::map<int, Route> delayed_local;
    std::map<int, Route>* delayed = delayed_first_miles ? delayed_first_miles : &delayed_local;

    // Step 1
    sc.D[0] = 0.0;

    // Step 2
    Pass pass = propagate(route, ctx, meta, 0);
    if (!pass.ok) return {false, 2, pass.fail_stop, pass.reason};

    // Steps 3-4: shift the depot departure to remove slack without extending
    // the route end.
    const double f0 = forward_slack(route, ctx, 0);
    double interior_wait = 0.0;
    for (std::size_t p = 1; p + 1 < route.stops.size(); ++p) interior_wait += sc.W[p];
    sc.D[0] = std::min(f0, interior_wait);

    // Step 5
    pass = propagate(route, ctx, meta, 0);
    if (!pass.ok) return {false, 5, pass.fail_stop, pass.reason};
    recompute_rho(route, ctx, meta);

    // Step 6
    EndpointResolver res{&ctx, &route, delayed};
    if (rho_sum(route) <= kEpsTime && check_travel_times(route, ctx, res).ok)
        return {true, 6, -1, ""};

    // Step 7
    if (step7(route, ctx, meta, delayed, /*check_each=*/true)) return {true, 7, -1, ""};

    // Step 8: cross-route repair for bus-transit-bus customers whose last
    // mile lies on this route.
    for (std::size_t p = 0; p < route.stops.size(); ++p) {
        const Stop& s = route.stops[p];
        if (s.kind != StopKind::Dropoff) continue;
        const Journey& j = ctx.journey(s.ref);
        if (j.option != 4 || j.first_bus == route.bus) continue;
        double L;
        if (!res.travel_time_of(s.ref, L)) continue;
        const auto& req = inst.requests[static_cast<std::size_t>(s.ref)];
        if (L <= req.max_travel_time + kEpsTime) continue;

        const Route& sigma_prime_cur = [&]() -> const Route& {
            auto it = delayed->find(j.first_bus);
            return it != delayed->end() ? it->second : ctx.route(j.first_bus);
        }();
        if (sigma_prime_cur.sched.f_delay) continue;

        Route copy = sigma_prime_cur;
        std::vector<StopMeta> meta_p = build_meta(copy, ctx);
        step7(copy, ctx, meta_p, delayed, /*check_each=*/false);
        (*delayed)[j.first_bus] = std::move(copy);
    }

    const TravelCheck final_check = check_travel_times(route, ctx, res);
    if (rho_sum(route) <= kEpsTime && final_check.ok) return {true, 8, -1, ""};

    // Step 9: infeasible with diagnostics.
    EvalVerdict v;
    v.feasible = false;
    v.fail_step = 9;
    v.fail_stop = final_check.bad_request;
    v.reason = rho_sum(route) > kEpsTime ? "transfer wait violation" : "max travel time violation";
    return v;
}

}  // namespace eidarp
