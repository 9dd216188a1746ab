// Benchmark: OpenMP-parallel kernels against their serial references.
// Covers transit-pair generation (per-source shortest paths), per-customer
// TP sets, and the multi-run solver.

#include <chrono>
#include <iostream>

#include "eidarp/generator.hpp"
#include "eidarp/search.hpp"
#include "eidarp/transit.hpp"

using namespace eidarp;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void bench_expansion() {
    GeneratorConfig cfg;
    cfg.n = 200;
    cfg.layout = "four";
    cfg.departures_per_direction = 6;
    cfg.headway = 10.0;
    const Instance inst = generate(cfg, 7);

    const auto nodes = expand_timetables(inst.lines, inst.params.gamma);
    auto t0 = Clock::now();
    const auto serial = generate_transit_pairs_serial(nodes, inst.params.eta_min,
                                                      inst.params.eta_max);
    const double t_serial = ms_since(t0);
    t0 = Clock::now();
    const auto parallel = generate_transit_pairs(nodes, inst.params.eta_min, inst.params.eta_max);
    const double t_parallel = ms_since(t0);

    std::cout << "transit pairs   nodes=" << nodes.size() << " tps=" << serial.tps.size()
              << "  serial " << t_serial << " ms,  openmp " << t_parallel << " ms  ("
              << (parallel.tps.size() == serial.tps.size() ? "match" : "MISMATCH") << ")\n";

    t0 = Clock::now();
    build_transit_graph(inst, false);
    const double g_serial = ms_since(t0);
    t0 = Clock::now();
    build_transit_graph(inst, true);
    const double g_parallel = ms_since(t0);
    std::cout << "customer TP sets n=" << cfg.n << "  serial " << g_serial << " ms,  openmp "
              << g_parallel << " ms\n";
}

void bench_multi_run() {
    GeneratorConfig cfg;
    cfg.n = 20;
    const Instance inst = generate(cfg, 11);
    const ExpandedTransitGraph graph = build_transit_graph(inst);
    SearchConfig sc = SearchConfig::from_params(inst.params, 3);
    sc.n_iter = 150;

    auto t0 = Clock::now();
    const SearchResult serial = run_multi(inst, graph, sc, 4, 1);
    const double t_serial = ms_since(t0);
    t0 = Clock::now();
    const SearchResult parallel = run_multi(inst, graph, sc, 4, 4);
    const double t_parallel = ms_since(t0);
    std::cout << "multi-run solve n=" << cfg.n << " runs=4  serial " << t_serial
              << " ms,  openmp " << t_parallel << " ms  (best "
              << serial.best.objective_cache << " vs " << parallel.best.objective_cache << ", "
              << (std::abs(serial.best.objective_cache - parallel.best.objective_cache) < 1e-9
                      ? "match"
                      : "MISMATCH")
              << ")\n";
}

}  // namespace

int main() {
    bench_expansion();
    bench_multi_run();
    return 0;
}
