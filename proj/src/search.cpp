#include "eidarp/search.hpp"

#include "eidarp/charging.hpp"
#include "eidarp/feasibility.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eidarp {

const std::vector<std::string> kDestroyOps = {"d_random", "d_worst", "d_related", "d_route"};
const std::vector<std::string> kRepairOps = {"r_random", "r_greedy", "r_regret", "r_TPpriority",
                                             "r_TP"};
const std::vector<std::string> kLocalSearchOps = {"ls_bus_exchange", "ls_exchange_tp",
                                                  "ls_replace_tp_bus", "ls_reassign_mile",
                                                  "ls_walk_to_bus"};

void SearchConfig::validate() const {
    auto known = [&](const std::string& op) {
        auto in = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), op) != v.end();
        };
        return in(kDestroyOps) || in(kRepairOps) || in(kLocalSearchOps);
    };
    for (const auto& op : disabled_ops)
        if (!known(op)) throw std::runtime_error("unknown operator: " + op);
    auto enabled_count = [&](const std::vector<std::string>& v) {
        int c = 0;
        for (const auto& op : v)
            if (!disabled_ops.count(op)) ++c;
        return c;
    };
    if (enabled_count(kDestroyOps) == 0) throw std::runtime_error("all destroy operators disabled");
    if (enabled_count(kRepairOps) == 0) throw std::runtime_error("all repair operators disabled");
}

namespace {

// Insertions whose travel terms would cost more than the rejection penalty
// are left rejected, which keeps every solution at or below the all-reject
// objective omega * n.
bool profitable(const InsertionPlan& plan) { return plan.feasible && plan.delta_cost <= 1e-9; }

bool try_apply(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
               const InsertionPlan& plan) {
    if (!profitable(plan)) return false;
    apply_insertion(inst, graph, sol, plan);
    return true;
}

std::vector<int> sorted_by_earliest(const Instance& inst, std::vector<int> ids) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const double ea = inst.requests[static_cast<std::size_t>(a)].otw().e;
        const double eb = inst.requests[static_cast<std::size_t>(b)].otw().e;
        if (ea != eb) return ea < eb;
        return a < b;
    });
    return ids;
}

}  // namespace

Solution construct_initial(const Instance& inst, const ExpandedTransitGraph& graph) {
    Solution sol = make_empty_solution(inst);
    std::vector<int> transit_eligible, rest;
    for (int r = 0; r < inst.n(); ++r) {
        if (!graph.per_customer[static_cast<std::size_t>(r)].empty())
            transit_eligible.push_back(r);
        else
            rest.push_back(r);
    }
    transit_eligible = sorted_by_earliest(inst, transit_eligible);
    rest = sorted_by_earliest(inst, rest);

    for (int r : transit_eligible) {
        bool placed = false;
        for (int option = 1; option <= 4 && !placed; ++option) {
            InsertionQuery q;
            q.request = r;
            q.force_option = option;
            placed = try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q).best);
        }
        if (!placed) {
            InsertionQuery q;
            q.request = r;
            q.force_option = 5;
            try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q).best);
        }
    }
    for (int r : rest) {
        InsertionQuery q;
        q.request = r;
        q.force_option = 5;
        try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q).best);
    }
    sol.objective_cache = compute_objective(inst, graph, sol);
    return sol;
}

double relatedness(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol,
                   int a, int b) {
    const auto& ra = inst.requests[static_cast<std::size_t>(a)];
    const auto& rb = inst.requests[static_cast<std::size_t>(b)];
    const double c_max = inst.max_arc_distance();
    const double spatial =
        c_max > 0.0 ? (distance_km(ra.origin, rb.origin) + distance_km(ra.destination, rb.destination)) /
                          (2.0 * c_max)
                    : 0.0;
    const auto& ja = sol.journeys[static_cast<std::size_t>(a)];
    const auto& jb = sol.journeys[static_cast<std::size_t>(b)];
    const double temporal = (std::abs(ja.dep - jb.dep) + std::abs(ja.arr - jb.arr)) /
                            (2.0 * inst.params.t_end);
    double shared = 0.0;
    if (graph.tp_union_size > 0) {
        const auto& ta = graph.per_customer[static_cast<std::size_t>(a)];
        const auto& tb = graph.per_customer[static_cast<std::size_t>(b)];
        int common = 0;
        for (const auto& x : ta)
            for (const auto& y : tb)
                if (x.tp == y.tp) ++common;
        shared = static_cast<double>(common) / static_cast<double>(graph.tp_union_size);
    }
    const double sum = spatial + temporal + shared;
    if (sum <= 0.0) return 1e9;
    return 1.0 / sum;
}

namespace {

double removal_gain(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol,
                    int r) {
    Solution tmp = sol;
    std::vector<int> extra;
    remove_customer(inst, graph, tmp, r, extra);
    return sol.objective_cache - tmp.objective_cache;
}

}  // namespace

std::vector<int> destroy(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                         const std::string& op, int n_destroy, Rng& rng) {
    std::vector<int> served = sol.served();
    std::vector<int> removed;
    if (served.empty()) return removed;
    n_destroy = std::min<int>(n_destroy, static_cast<int>(served.size()));

    std::vector<int> picks;
    if (op == "d_random") {
        rng.shuffle(served);
        picks.assign(served.begin(), served.begin() + n_destroy);
    } else if (op == "d_worst") {
        std::vector<std::pair<double, int>> gains;
        for (int r : served) gains.emplace_back(removal_gain(inst, graph, sol, r), r);
        std::sort(gains.begin(), gains.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first > y.first;
            return x.second < y.second;
        });
        for (int i = 0; i < n_destroy; ++i) picks.push_back(gains[static_cast<std::size_t>(i)].second);
    } else if (op == "d_related") {
        const int seed_r = served[static_cast<std::size_t>(rng.next_below(served.size()))];
        std::vector<std::pair<double, int>> rel;
        for (int r : served)
            if (r != seed_r) rel.emplace_back(relatedness(inst, graph, sol, seed_r, r), r);
        std::sort(rel.begin(), rel.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first > y.first;
            return x.second < y.second;
        });
        picks.push_back(seed_r);
        for (int i = 0; i + 1 < n_destroy && i < static_cast<int>(rel.size()); ++i)
            picks.push_back(rel[static_cast<std::size_t>(i)].second);
    } else if (op == "d_route") {
        std::vector<int> used;
        for (const auto& r : sol.routes)
            if (r.used()) used.push_back(r.bus);
        if (used.empty()) return removed;
        const int bus = used[static_cast<std::size_t>(rng.next_below(used.size()))];
        std::vector<int> on_route;
        for (const auto& j : sol.journeys)
            if (j.served() && ((j.first_mode == LegMode::Bus && j.first_bus == bus) ||
                               (j.last_mode == LegMode::Bus && j.last_bus == bus)))
                on_route.push_back(j.request);
        picks = on_route;
    } else {
        throw std::runtime_error("unknown destroy operator: " + op);
    }

    for (int r : picks) {
        if (!sol.journeys[static_cast<std::size_t>(r)].served()) {
            if (std::find(removed.begin(), removed.end(), r) == removed.end()) removed.push_back(r);
            continue;  // already unloaded by a cascade
        }
        std::vector<int> extra;
        remove_customer(inst, graph, sol, r, extra);
        removed.push_back(r);
        for (int x : extra)
            if (std::find(removed.begin(), removed.end(), x) == removed.end()) removed.push_back(x);
    }
    return removed;
}

void repair(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
            const std::string& op, std::vector<int> unserved, Rng& rng) {
    std::sort(unserved.begin(), unserved.end());
    unserved.erase(std::unique(unserved.begin(), unserved.end()), unserved.end());
    if (unserved.empty()) return;

    if (op == "r_random") {
        rng.shuffle(unserved);
        for (int r : unserved) {
            InsertionQuery q;
            q.request = r;
            try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q).best);
        }
    } else if (op == "r_greedy") {
        std::vector<int> pool = unserved;
        while (!pool.empty()) {
            double best_cost = std::numeric_limits<double>::infinity();
            int best_r = -1;
            InsertionPlan best_plan;
            for (int r : pool) {
                InsertionQuery q;
                q.request = r;
                InsertionResult res = find_best_insertion(inst, graph, sol, q);
                if (res.best.feasible && res.best.delta_cost < best_cost - 1e-12) {
                    best_cost = res.best.delta_cost;
                    best_r = r;
                    best_plan = std::move(res.best);
                }
            }
            if (best_r < 0 || !try_apply(inst, graph, sol, best_plan)) break;
            pool.erase(std::remove(pool.begin(), pool.end(), best_r), pool.end());
        }
    } else if (op == "r_regret") {
        const int k = rng.uniform_int(2, 3);
        std::vector<int> pool = unserved;
        while (!pool.empty()) {
            double best_regret = -1.0;
            int best_r = -1;
            InsertionPlan best_plan;
            for (int r : pool) {
                InsertionQuery q;
                q.request = r;
                q.k_costs = k;
                InsertionResult res = find_best_insertion(inst, graph, sol, q);
                if (!res.best.feasible) continue;
                double regret = 0.0;
                for (int i = 1; i < k; ++i) {
                    if (i < static_cast<int>(res.costs.size()))
                        regret += res.costs[static_cast<std::size_t>(i)] - res.costs[0];
                    else
                        regret += 1e6;  // fewer than k placements: insert first
                }
                if (regret > best_regret + 1e-12 || (best_r < 0)) {
                    best_regret = regret;
                    best_r = r;
                    best_plan = std::move(res.best);
                }
            }
            if (best_r < 0) break;
            pool.erase(std::remove(pool.begin(), pool.end(), best_r), pool.end());
            try_apply(inst, graph, sol, best_plan);
        }
    } else if (op == "r_TPpriority") {
        std::vector<int> with_tp, without_tp;
        for (int r : unserved)
            (graph.per_customer[static_cast<std::size_t>(r)].empty() ? without_tp : with_tp)
                .push_back(r);
        for (int r : sorted_by_earliest(inst, with_tp)) {
            InsertionQuery q;
            q.request = r;
            try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q).best);
        }
        for (int r : sorted_by_earliest(inst, without_tp)) {
            InsertionQuery q;
            q.request = r;
            try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q).best);
        }
    } else if (op == "r_TP") {
        // Insert the largest group of unserved customers sharing one TP
        // together, preferring placements on that TP.
        std::map<int, std::vector<int>> by_tp;
        for (int r : unserved)
            for (const auto& ctp : graph.per_customer[static_cast<std::size_t>(r)])
                by_tp[ctp.tp].push_back(r);
        int best_tp = -1;
        std::size_t best_size = 0;
        for (const auto& [tp, members] : by_tp)
            if (members.size() > best_size) {
                best_size = members.size();
                best_tp = tp;
            }
        std::vector<int> grouped, rest;
        for (int r : unserved) {
            bool in_group = false;
            if (best_tp >= 0)
                for (const auto& ctp : graph.per_customer[static_cast<std::size_t>(r)])
                    if (ctp.tp == best_tp) in_group = true;
            (in_group ? grouped : rest).push_back(r);
        }
        for (int r : sorted_by_earliest(inst, grouped)) {
            InsertionQuery q;
            q.request = r;
            q.force_tp = best_tp;
            if (!try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q).best)) {
                InsertionQuery q2;
                q2.request = r;
                try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q2).best);
            }
        }
        for (int r : sorted_by_earliest(inst, rest)) {
            InsertionQuery q;
            q.request = r;
            try_apply(inst, graph, sol, find_best_insertion(inst, graph, sol, q).best);
        }
    } else {
        throw std::runtime_error("unknown repair operator: " + op);
    }
}

namespace {

// Remove one customer and re-insert with the given restrictions; keep the
// result if the total objective strictly improves.
bool improve_by_reinsertion(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                            int r, int force_option, int force_tp) {
    Solution tmp = sol;
    std::vector<int> extra;
    remove_customer(inst, graph, tmp, r, extra);
    if (!extra.empty()) return false;  // cascaded removals: not a clean move
    InsertionQuery q;
    q.request = r;
    q.force_option = force_option;
    q.force_tp = force_tp;
    InsertionResult res = find_best_insertion(inst, graph, tmp, q);
    if (!res.best.feasible) return false;
    apply_insertion(inst, graph, tmp, res.best);
    if (tmp.objective_cache < sol.objective_cache - 1e-9) {
        sol = std::move(tmp);
        return true;
    }
    return false;
}

bool ls_bus_exchange(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol);

bool ls_exchange_tp(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol) {
    bool improved = false;
    for (int r = 0; r < inst.n(); ++r) {
        const Journey& j = sol.journeys[static_cast<std::size_t>(r)];
        if (!j.served() || !j.uses_transit()) continue;
        const int cur_tp = j.tp;
        for (const auto& ctp : graph.per_customer[static_cast<std::size_t>(r)]) {
            if (ctp.tp == cur_tp) continue;
            if (improve_by_reinsertion(inst, graph, sol, r, 0, ctp.tp)) {
                improved = true;
                break;
            }
        }
    }
    return improved;
}

bool ls_replace_tp_bus(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol) {
    bool improved = false;
    for (int r = 0; r < inst.n(); ++r) {
        const Journey& j = sol.journeys[static_cast<std::size_t>(r)];
        if (!j.served() || !j.uses_transit()) continue;
        if (improve_by_reinsertion(inst, graph, sol, r, 5, -1)) improved = true;
    }
    return improved;
}

bool ls_reassign_mile(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol) {
    bool improved = false;
    for (int r = 0; r < inst.n(); ++r) {
        const Journey& j = sol.journeys[static_cast<std::size_t>(r)];
        if (!j.served() || !j.uses_transit()) continue;
        if (j.first_mode != LegMode::Bus && j.last_mode != LegMode::Bus) continue;
        if (improve_by_reinsertion(inst, graph, sol, r, j.option, j.tp)) improved = true;
    }
    return improved;
}

bool ls_walk_to_bus(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol) {
    bool improved = false;
    for (int r = 0; r < inst.n(); ++r) {
        const Journey& j = sol.journeys[static_cast<std::size_t>(r)];
        if (!j.served() || !j.uses_transit()) continue;
        std::vector<int> targets;
        if (j.option == 1) targets = {2, 3};
        else if (j.option == 2) targets = {4};
        else if (j.option == 3) targets = {4};
        bool done = false;
        for (int option : targets) {
            if (improve_by_reinsertion(inst, graph, sol, r, option, j.tp)) {
                improved = true;
                done = true;
                break;
            }
        }
        (void)done;
    }
    return improved;
}

bool ls_bus_exchange(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol) {
    bool improved = false;
    for (int bus = 0; bus < static_cast<int>(sol.routes.size()); ++bus) {
        if (!sol.routes[static_cast<std::size_t>(bus)].used()) continue;
        const Bus& cur = inst.buses[static_cast<std::size_t>(bus)];
        // candidate replacement buses: idle, from a different depot; one per class
        std::vector<std::tuple<int, int, int>> seen;
        for (int k2 = 0; k2 < static_cast<int>(sol.routes.size()); ++k2) {
            if (k2 == bus || sol.routes[static_cast<std::size_t>(k2)].used()) continue;
            const Bus& alt = inst.buses[static_cast<std::size_t>(k2)];
            if (alt.origin_depot == cur.origin_depot && alt.dest_depot == cur.dest_depot) continue;
            const std::tuple<int, int, int> key{alt.type_id, alt.origin_depot, alt.dest_depot};
            if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
            seen.push_back(key);

            Solution tmp = sol;
            Route moved;
            moved.bus = k2;
            moved.stops = tmp.routes[static_cast<std::size_t>(bus)].stops;
            moved.stops.front().ref = alt.origin_depot;
            moved.stops.back().ref = alt.dest_depot;
            moved.stops.erase(std::remove_if(moved.stops.begin(), moved.stops.end(),
                                             [](const Stop& s) { return s.kind == StopKind::Charger; }),
                              moved.stops.end());
            for (auto& c : tmp.calendars) c.release(bus);
            tmp.routes[static_cast<std::size_t>(bus)] = empty_route(inst, bus);
            tmp.routes[static_cast<std::size_t>(bus)].sched.resize(2);
            tmp.routes[static_cast<std::size_t>(k2)] = std::move(moved);
            for (auto& jj : tmp.journeys) {
                if (!jj.served()) continue;
                if (jj.first_mode == LegMode::Bus && jj.first_bus == bus) jj.first_bus = k2;
                if (jj.last_mode == LegMode::Bus && jj.last_bus == bus) jj.last_bus = k2;
            }
            EvalContext ctx(inst, graph, tmp);
            std::map<int, Route> delayed;
            Route& target = tmp.routes[static_cast<std::size_t>(k2)];
            if (!nine_step_evaluate(target, ctx, &delayed).feasible) continue;
            for (auto& [b2, rt] : delayed)
                if (b2 != k2) tmp.routes[static_cast<std::size_t>(b2)] = std::move(rt);
            if (!schedule_recharges(target, ctx, tmp.calendars).success) continue;
            refresh_route_journeys(inst, graph, tmp, k2);
            tmp.objective_cache = compute_objective(inst, graph, tmp);
            if (tmp.objective_cache < sol.objective_cache - 1e-9) {
                sol = std::move(tmp);
                improved = true;
                break;
            }
        }
    }
    return improved;
}

}  // namespace

bool local_search(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                  const std::set<std::string>& disabled) {
    bool any = false;
    bool improved = true;
    while (improved) {
        improved = false;
        if (!disabled.count("ls_bus_exchange")) improved |= ls_bus_exchange(inst, graph, sol);
        if (!disabled.count("ls_exchange_tp")) improved |= ls_exchange_tp(inst, graph, sol);
        if (!disabled.count("ls_replace_tp_bus")) improved |= ls_replace_tp_bus(inst, graph, sol);
        if (!disabled.count("ls_reassign_mile")) improved |= ls_reassign_mile(inst, graph, sol);
        if (!disabled.count("ls_walk_to_bus")) improved |= ls_walk_to_bus(inst, graph, sol);
        any |= improved;
    }
    return any;
}

SearchResult run_search(const Instance& inst, const ExpandedTransitGraph& graph,
                        const SearchConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(config.seed);

    std::vector<std::string> destroys, repairs;
    for (const auto& op : kDestroyOps)
        if (!config.disabled_ops.count(op)) destroys.push_back(op);
    for (const auto& op : kRepairOps)
        if (!config.disabled_ops.count(op)) repairs.push_back(op);

    SearchResult out;
    Solution s = construct_initial(inst, graph);
    s.seed = config.seed;
    Solution best = s;
    out.best_trace.push_back(best.objective_cache);

    const double t_max = config.t_max_factor * inst.mean_arc_distance();
    double temp = t_max;
    const int n = inst.n();
    const int destroy_cap = std::max(1, static_cast<int>(std::ceil(n * config.xi_max)));

    for (int iter = 1; iter <= config.n_iter && n > 0; ++iter) {
        const std::string& d_op =
            destroys[static_cast<std::size_t>(rng.next_below(destroys.size()))];
        const std::string& r_op = repairs[static_cast<std::size_t>(rng.next_below(repairs.size()))];
        const int n_destroy = rng.uniform_int(1, destroy_cap);

        Solution work = s;
        std::vector<int> pool = destroy(inst, graph, work, d_op, n_destroy, rng);
        // previously rejected customers stay in the unserved pool
        for (int r : work.rejected())
            if (std::find(pool.begin(), pool.end(), r) == pool.end()) pool.push_back(r);
        repair(inst, graph, work, r_op, std::move(pool), rng);

        if (work.objective_cache < config.alpha_ls * best.objective_cache)
            local_search(inst, graph, work, config.disabled_ops);

        temp -= config.t_red > 0.0 ? t_max / config.t_red : 0.0;
        if (temp <= 0.0) temp = t_max;

        if (work.objective_cache < best.objective_cache + temp) s = work;
        if (work.objective_cache < best.objective_cache) best = std::move(work);
        out.best_trace.push_back(best.objective_cache);
    }

    best.seed = config.seed;
    out.best = std::move(best);
    out.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

SearchResult run_multi(const Instance& inst, const ExpandedTransitGraph& graph,
                       const SearchConfig& config, int runs, int jobs) {
    runs = std::max(1, runs);
    std::vector<SearchResult> results(static_cast<std::size_t>(runs));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs)) if (jobs > 1)
#endif
    for (int i = 0; i < runs; ++i) {
        SearchConfig c = config;
        c.seed = config.seed + static_cast<std::uint64_t>(i);
        results[static_cast<std::size_t>(i)] = run_search(inst, graph, c);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].best.objective_cache < results[best].best.objective_cache - 1e-12) best = i;
    return results[best];
}

}  // namespace eidarp
