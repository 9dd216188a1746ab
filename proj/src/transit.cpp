#include "eidarp/transit.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eidarp {

namespace {

struct RunKey {
    double start;
    int line;
    int run;
};

}  // namespace

std::vector<TransitNode> expand_timetables(const std::vector<TransitLine>& lines, double gamma) {
    std::vector<RunKey> order;
    for (const auto& line : lines)
        for (std::size_t ri = 0; ri < line.runs.size(); ++ri)
            order.push_back({line.runs[ri].times.front(), line.id, static_cast<int>(ri)});
    std::sort(order.begin(), order.end(), [](const RunKey& a, const RunKey& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.line != b.line) return a.line < b.line;
        return a.run < b.run;
    });

    std::vector<TransitNode> nodes;
    for (const auto& key : order) {
        const auto& line = lines[static_cast<std::size_t>(key.line)];
        const auto& run = line.runs[static_cast<std::size_t>(key.run)];
        const std::size_t m = run.times.size();
        for (std::size_t k = 0; k < m; ++k) {
            TransitNode node;
            node.id = static_cast<int>(nodes.size()) + 1;
            node.line_id = key.line;
            node.run_index = key.run;
            node.station_index = static_cast<int>(k);
            const std::size_t station = run.reverse ? (m - 1 - k) : k;
            node.location = line.stations[station];
            node.theta_dep = run.times[k];
            node.theta_arr = (k == 0) ? run.times[k] : run.times[k] - line.dwell;
            node.is_run_first = (k == 0);
            node.is_run_last = (k + 1 == m);
            if (node.is_run_last) node.theta_dep = node.theta_arr;  // no onward departure
            node.tw = {node.theta_dep - gamma, node.theta_arr + gamma};
            nodes.push_back(node);
        }
    }
    return nodes;
}

namespace {

struct Arc {
    int to;
    double weight;
    bool transfer;
};

struct TempGraph {
    std::vector<std::vector<Arc>> out;  // indexed by node id - 1
    std::vector<TransferArc> transfers;
};

TempGraph build_temp_graph(const std::vector<TransitNode>& nodes, double eta_min, double eta_max) {
    TempGraph g;
    g.out.resize(nodes.size());

    // Direct arcs: every ordered pair within a run, weight = arrival(j) - departure(i).
    std::size_t i = 0;
    while (i < nodes.size()) {
        std::size_t j = i;
        while (j + 1 < nodes.size() && nodes[j + 1].line_id == nodes[i].line_id &&
               nodes[j + 1].run_index == nodes[i].run_index && !nodes[j + 1].is_run_first)
            ++j;
        for (std::size_t a = i; a <= j; ++a)
            for (std::size_t b = a + 1; b <= j; ++b)
                g.out[a].push_back({nodes[b].id, nodes[b].theta_arr - nodes[a].theta_dep, false});
        i = j + 1;
    }

    // Transfer arcs between co-located nodes of different lines. The source
    // needs an arrival (a vehicle to step off) and the target a departure.
    for (const auto& from : nodes) {
        if (from.is_run_first) continue;
        for (const auto& to : nodes) {
            if (to.line_id == from.line_id) continue;
            if (to.is_run_last) continue;
            if (!same_location(from.location, to.location)) continue;
            const double wait = to.theta_dep - from.theta_arr;
            if (wait >= eta_min - kEpsTime && wait <= eta_max + kEpsTime) {
                g.out[static_cast<std::size_t>(from.id - 1)].push_back({to.id, wait, true});
                g.transfers.push_back({from.id, to.id, wait});
            }
        }
    }
    for (auto& arcs : g.out)
        std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
    return g;
}

struct Label {
    double dist = std::numeric_limits<double>::infinity();
    int transfers = std::numeric_limits<int>::max();
    bool last_direct = false;
};

// Dijkstra from one source. The first arc must be direct (you board a vehicle
// at the entry node); ties prefer fewer transfers, then a direct final arc,
// then lower node id, which keeps builds deterministic.
void shortest_from(const TempGraph& g, const std::vector<TransitNode>& nodes, int source,
                   std::vector<Label>& labels) {
    labels.assign(nodes.size(), Label{});
    using Item = std::tuple<double, int, int>;  // dist, transfers, node id
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

    const auto& src_arcs = g.out[static_cast<std::size_t>(source - 1)];
    for (const auto& arc : src_arcs) {
        if (arc.transfer) continue;  // boarding happens on a direct arc
        auto& lab = labels[static_cast<std::size_t>(arc.to - 1)];
        if (arc.weight < lab.dist - kEpsTime) {
            lab = {arc.weight, 0, true};
            pq.emplace(arc.weight, 0, arc.to);
        }
    }
    while (!pq.empty()) {
        auto [d, tr, u] = pq.top();
        pq.pop();
        const auto& lu = labels[static_cast<std::size_t>(u - 1)];
        if (d > lu.dist + kEpsTime || tr > lu.transfers) continue;
        for (const auto& arc : g.out[static_cast<std::size_t>(u - 1)]) {
            const double nd = d + arc.weight;
            const int nt = tr + (arc.transfer ? 1 : 0);
            auto& lab = labels[static_cast<std::size_t>(arc.to - 1)];
            const bool better = nd < lab.dist - kEpsTime ||
                                (nd < lab.dist + kEpsTime && nt < lab.transfers);
            const bool equal = nd < lab.dist + kEpsTime && nt == lab.transfers;
            if (better) {
                lab = {nd, nt, !arc.transfer};
                pq.emplace(nd, nt, arc.to);
            } else if (equal && !arc.transfer && !lab.last_direct) {
                lab.last_direct = true;  // same cost, but this path truly alights here
            }
        }
    }
}

TpGenResult generate_impl(const std::vector<TransitNode>& nodes, double eta_min, double eta_max,
                          bool parallel) {
    TpGenResult result;
    if (nodes.empty()) return result;
    const TempGraph g = build_temp_graph(nodes, eta_min, eta_max);
    result.transfer_arcs = g.transfers;

    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<TransitPair>> per_source(static_cast<std::size_t>(n));

    auto process = [&](int src_idx) {
        const int source = src_idx + 1;
        std::vector<Label> labels;
        shortest_from(g, nodes, source, labels);
        auto& out = per_source[static_cast<std::size_t>(src_idx)];
        for (int t = 1; t <= n; ++t) {
            if (t == source) continue;
            const auto& lab = labels[static_cast<std::size_t>(t - 1)];
            if (!std::isfinite(lab.dist)) continue;
            if (!lab.last_direct) continue;  // path ends on a transfer: not a real exit
            if (same_location(nodes[static_cast<std::size_t>(source - 1)].location,
                              nodes[static_cast<std::size_t>(t - 1)].location))
                continue;
            out.push_back({source, t, lab.dist, lab.transfers});
        }
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int s = 0; s < n; ++s) process(s);
    } else {
        for (int s = 0; s < n; ++s) process(s);
    }

    for (auto& v : per_source)
        for (auto& tp : v) result.tps.push_back(tp);
    return result;
}

}  // namespace

TpGenResult generate_transit_pairs(const std::vector<TransitNode>& nodes, double eta_min,
                                   double eta_max, bool parallel) {
    return generate_impl(nodes, eta_min, eta_max, parallel);
}

TpGenResult generate_transit_pairs_serial(const std::vector<TransitNode>& nodes, double eta_min,
                                          double eta_max) {
    return generate_impl(nodes, eta_min, eta_max, false);
}

double walk_time_or_reject(const Point& a, const Point& b, const Params& params) {
    const double d = distance_km(a, b);
    if (d > params.max_walk_dist + 1e-12) return -1.0;
    return d / params.walk_speed;
}

std::vector<CustomerTp> customer_tp_set(const Request& r, const std::vector<TransitNode>& nodes,
                                        const std::vector<TransitPair>& tps, const Params& params,
                                        double bus_speed) {
    std::vector<CustomerTp> out;
    if (!r.origin_tw || !r.dest_tw) return out;
    const auto& otw = r.otw();
    const auto& dtw = r.dtw();
    const double mu = params.service_time;

    for (std::size_t ti = 0; ti < tps.size(); ++ti) {
        const auto& tp = tps[ti];
        const auto& ni = nodes[static_cast<std::size_t>(tp.entry - 1)];
        const auto& nj = nodes[static_cast<std::size_t>(tp.exit - 1)];
        const double theta_i = ni.theta_dep;
        const double theta_j = nj.theta_arr;

        const double tw_orig = walk_time_or_reject(r.origin, ni.location, params);
        const double tw_dest = walk_time_or_reject(nj.location, r.destination, params);
        const double tb_orig = bus_travel_time(r.origin, ni.location, bus_speed);
        const double tb_dest = bus_travel_time(nj.location, r.destination, bus_speed);

        const bool orig_walk = tw_orig >= 0.0 &&
                               otw.e + tw_orig <= theta_i + kEpsTime &&
                               otw.l + tw_orig >= theta_i - params.gamma - kEpsTime;
        const bool orig_bus = otw.e + tb_orig <= theta_i + kEpsTime &&
                              otw.l + tb_orig >= theta_i - params.gamma - kEpsTime;
        const bool dest_walk = tw_dest >= 0.0 &&
                               theta_j + tw_dest <= dtw.l + kEpsTime &&
                               theta_j + tw_dest + params.gamma >= dtw.e - kEpsTime;
        const bool dest_bus = theta_j + tb_dest <= dtw.l + kEpsTime &&
                              theta_j + tb_dest + params.gamma >= dtw.e - kEpsTime;

        std::uint8_t flags = 0;
        const double transit = tp.travel_time;
        auto fits = [&](double first_min, double last_min) {
            return first_min + transit + last_min <= r.max_travel_time + kEpsTime;
        };
        if (orig_walk && dest_walk && fits(tw_orig, tw_dest)) flags |= kOpt1;
        if (orig_bus && dest_walk && fits(mu + tb_orig, tw_dest)) flags |= kOpt2;
        if (orig_walk && dest_bus && fits(tw_orig, mu + tb_dest)) flags |= kOpt3;
        if (orig_bus && dest_bus && fits(mu + tb_orig, mu + tb_dest)) flags |= kOpt4;

        if (flags != 0) out.push_back({static_cast<int>(ti), flags});
    }
    return out;
}

int ExpandedTransitGraph::tp_index(int entry, int exit) const {
    for (std::size_t i = 0; i < tps.size(); ++i)
        if (tps[i].entry == entry && tps[i].exit == exit) return static_cast<int>(i);
    return -1;
}

ExpandedTransitGraph build_transit_graph(const Instance& inst, bool parallel) {
    ExpandedTransitGraph g;
    g.nodes = expand_timetables(inst.lines, inst.params.gamma);
    auto gen = generate_transit_pairs(g.nodes, inst.params.eta_min, inst.params.eta_max, parallel);
    g.tps = std::move(gen.tps);
    g.transfer_arcs = std::move(gen.transfer_arcs);

    g.per_customer.resize(inst.requests.size());
    const double speed = inst.ref_bus_speed();
    const int n = inst.n();
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i)
            g.per_customer[static_cast<std::size_t>(i)] =
                customer_tp_set(inst.requests[static_cast<std::size_t>(i)], g.nodes, g.tps,
                                inst.params, speed);
    } else {
        for (int i = 0; i < n; ++i)
            g.per_customer[static_cast<std::size_t>(i)] =
                customer_tp_set(inst.requests[static_cast<std::size_t>(i)], g.nodes, g.tps,
                                inst.params, speed);
    }

    std::vector<char> in_union(g.tps.size(), 0);
    for (const auto& set : g.per_customer)
        for (const auto& ctp : set) in_union[static_cast<std::size_t>(ctp.tp)] = 1;
    g.tp_union_size = static_cast<std::size_t>(std::count(in_union.begin(), in_union.end(), 1));
    return g;
}

std::string nodes_csv(const ExpandedTransitGraph& g) {
    std::ostringstream os;
    os << "id,line,run,station,x,y,theta_arr,theta_dep,tw_e,tw_l\n";
    for (const auto& n : g.nodes)
        os << n.id << ',' << n.line_id << ',' << n.run_index << ',' << n.station_index << ','
           << n.location.x << ',' << n.location.y << ',' << n.theta_arr << ',' << n.theta_dep
           << ',' << n.tw.e << ',' << n.tw.l << '\n';
    return os.str();
}

std::string tps_csv(const ExpandedTransitGraph& g) {
    std::ostringstream os;
    os << "entry,exit,travel_time,transfers\n";
    for (const auto& tp : g.tps)
        os << tp.entry << ',' << tp.exit << ',' << tp.travel_time << ',' << tp.transfers << '\n';
    return os.str();
}

}  // namespace eidarp
