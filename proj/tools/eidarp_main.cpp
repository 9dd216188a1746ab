#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eidarp/exact.hpp"
#include "eidarp/generator.hpp"
#include "eidarp/io.hpp"
#include "eidarp/search.hpp"
#include "eidarp/verify.hpp"

using namespace eidarp;

namespace {

int log_level() {
    const char* v = std::getenv("EIDARP_LOG");
    return v ? std::atoi(v) : 1;
}

void logln(int level, const std::string& msg) {
    if (log_level() >= level) std::cerr << msg << "\n";
}

std::vector<double> parse_values(const std::string& spec) {
    // "a:step:b" or comma-separated list
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double a, step, b;
        char c1, c2;
        std::istringstream is(spec);
        if (!(is >> a >> c1 >> step >> c2 >> b) || c1 != ':' || c2 != ':' || step <= 0)
            throw CLI::ValidationError("--values", "expected a:step:b or v1,v2,...");
        for (double v = a; v <= b + 1e-9; v += step) out.push_back(v);
    } else {
        std::istringstream is(spec);
        std::string tok;
        while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--values", "no values given");
    return out;
}

void add_generator_flags(CLI::App* cmd, GeneratorConfig& cfg) {
    cmd->add_option("--n", cfg.n, "number of customers");
    cmd->add_option("--area", cfg.area, "square side (km)");
    cmd->add_option("--layout", cfg.layout, "transit layout: none|one|two|three|four");
    cmd->add_option("--departures", cfg.departures_per_direction, "departures per direction");
    cmd->add_option("--headway", cfg.headway, "headway (min)");
    cmd->add_option("--fleet", cfg.fleet, "fleet size (0 = unlimited)");
    cmd->add_option("--depots", cfg.n_depots, "number of depots");
    cmd->add_option("--init-soc", cfg.init_soc_fraction, "initial SoC as battery fraction");
    cmd->add_option("--bus-speed", cfg.bus_speed_kmh, "bus speed (km/h)");
    cmd->add_option("--transit-speed", cfg.transit_speed_kmh, "transit speed (km/h)");
    cmd->add_option("--outbound", cfg.outbound_fraction, "outbound customer fraction");
    cmd->add_option("--phi", cfg.params.phi, "detour factor");
    cmd->add_option("--lambda2", cfg.params.lambda2, "customer travel time weight");
    cmd->add_option("--gamma", cfg.params.gamma, "max transfer wait (min)");
}

Params load_params_override(const std::string& path, Params base) {
    // params file: the instance-file "params" block on its own
    if (path.empty()) return base;
    const std::string text = read_file(path);
    const std::string wrapped = "{\"params\":" + text + "}";
    Instance parsed = instance_from_json_text(wrapped);
    return parsed.params;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eidarp: electric integrated dial-a-ride solver"};
    app.require_subcommand(1);

    // ---- generate ----
    auto* gen_cmd = app.add_subcommand("generate", "generate a synthetic instance");
    GeneratorConfig gen_cfg;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "instance.json";
    add_generator_flags(gen_cmd, gen_cfg);
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--out", gen_out, "output instance file");

    // ---- expand ----
    auto* expand_cmd = app.add_subcommand("expand", "dump the departure-expanded transit graph");
    std::string expand_instance, expand_nodes = "nodes.csv", expand_tps = "tps.csv";
    expand_cmd->add_option("--instance", expand_instance, "instance file")->required();
    expand_cmd->add_option("--nodes-csv", expand_nodes, "nodes table output");
    expand_cmd->add_option("--tps-csv", expand_tps, "transit pairs table output");

    // ---- solve ----
    auto* solve_cmd = app.add_subcommand("solve", "run the hybrid LNS");
    std::string solve_instance, solve_out = "solution.json", solve_kpi, solve_params;
    std::uint64_t solve_seed = 1;
    int solve_runs = 1, solve_iters = -1, solve_jobs = 1;
    std::vector<std::string> solve_disable;
    solve_cmd->add_option("--instance", solve_instance, "instance file")->required();
    solve_cmd->add_option("--seed", solve_seed, "base seed");
    solve_cmd->add_option("--runs", solve_runs, "independent runs (best kept)");
    solve_cmd->add_option("--iters", solve_iters, "LNS iterations (default from params)");
    solve_cmd->add_option("--params", solve_params, "params override file (JSON block)");
    solve_cmd->add_option("--disable-op", solve_disable, "disable an operator by name");
    solve_cmd->add_option("--out", solve_out, "solution file");
    solve_cmd->add_option("--kpi-csv", solve_kpi, "KPI CSV output");
    solve_cmd->add_option("--jobs", solve_jobs, "parallel runs (default 1)");

    // ---- check ----
    auto* check_cmd = app.add_subcommand("check", "verify a solution file");
    std::string check_instance, check_solution;
    check_cmd->add_option("--instance", check_instance, "instance file")->required();
    check_cmd->add_option("--solution", check_solution, "solution file")->required();

    // ---- kpi ----
    auto* kpi_cmd = app.add_subcommand("kpi", "print KPIs of a solution file");
    std::string kpi_instance, kpi_solution, kpi_csv;
    kpi_cmd->add_option("--instance", kpi_instance, "instance file")->required();
    kpi_cmd->add_option("--solution", kpi_solution, "solution file")->required();
    kpi_cmd->add_option("--csv", kpi_csv, "write KPI CSV here instead of stdout");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "one-parameter experiment harness");
    GeneratorConfig sweep_cfg;
    sweep_cfg.n = 100;
    std::string sweep_axis, sweep_values, sweep_out = "sweep.csv";
    std::uint64_t sweep_seed = 1;
    int sweep_runs = 1, sweep_jobs = 1, sweep_iters = -1;
    add_generator_flags(sweep_cmd, sweep_cfg);
    sweep_cmd
        ->add_option("--axis", sweep_axis,
                     "phi|lambda2|gamma|fleet|bus_speed|init_soc|headway|n_lines")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "a:step:b or v1,v2,...")->required();
    sweep_cmd->add_option("--runs", sweep_runs, "runs per value");
    sweep_cmd->add_option("--seed", sweep_seed, "instance + search seed");
    sweep_cmd->add_option("--iters", sweep_iters, "LNS iterations per run");
    sweep_cmd->add_option("--jobs", sweep_jobs, "parallel (value,run) cells");
    sweep_cmd->add_option("--out", sweep_out, "CSV output");

    // ---- oracle ----
    auto* oracle_cmd = app.add_subcommand("oracle", "independent verifier / exact tiny solver");
    std::string oracle_instance, oracle_verify, oracle_exact_out;
    bool oracle_exact = false;
    oracle_cmd->add_option("--instance", oracle_instance, "instance file")->required();
    oracle_cmd->add_option("--verify", oracle_verify, "solution file to verify");
    oracle_cmd->add_flag("--exact", oracle_exact, "brute-force optimum of a tiny instance");
    oracle_cmd->add_option("--out", oracle_exact_out, "solution output for --exact");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_cmd) {
            const Instance inst = generate(gen_cfg, gen_seed);
            save_instance(inst, gen_out);
            logln(1, "generated " + gen_out + " with " + std::to_string(inst.n()) + " customers");
            return 0;
        }
        if (*expand_cmd) {
            const Instance inst = load_instance(expand_instance);
            const ExpandedTransitGraph graph = build_transit_graph(inst);
            write_file(expand_nodes, nodes_csv(graph));
            write_file(expand_tps, tps_csv(graph));
            logln(1, "expanded: " + std::to_string(graph.nodes.size()) + " nodes, " +
                         std::to_string(graph.tps.size()) + " transit pairs, " +
                         std::to_string(graph.transfer_arcs.size()) + " transfer arcs");
            return 0;
        }
        if (*solve_cmd) {
            Instance inst = load_instance(solve_instance);
            inst.params = load_params_override(solve_params, inst.params);
            const ExpandedTransitGraph graph = build_transit_graph(inst);
            SearchConfig cfg = SearchConfig::from_params(inst.params, solve_seed);
            if (solve_iters > 0) cfg.n_iter = solve_iters;
            for (const auto& op : solve_disable) cfg.disabled_ops.insert(op);
            cfg.validate();
            {
                std::ostringstream echo;
                echo << "solve: n=" << inst.n() << " seed=" << solve_seed << " runs=" << solve_runs
                     << " iters=" << cfg.n_iter << " t_max_factor=" << cfg.t_max_factor
                     << " T_red=" << cfg.t_red << " xi_max=" << cfg.xi_max
                     << " alpha_ls=" << cfg.alpha_ls;
                logln(1, echo.str());
            }
            const SearchResult res = run_multi(inst, graph, cfg, solve_runs, solve_jobs);
            if (log_level() >= 2)
                for (std::size_t i = 0; i < res.best_trace.size(); ++i)
                    std::cerr << "iter " << i << " best " << res.best_trace[i] << "\n";
            save_solution(inst, graph, res.best, solve_out);
            const VerifyReport rep = verify(inst, graph, res.best);
            if (!rep.ok()) {
                std::cerr << "internal error: solver output failed verification\n"
                          << rep.to_string();
                return 1;
            }
            KpiReport kpi = compute_kpis(inst, graph, res.best);
            kpi.runtime_s = res.runtime_s;
            if (!solve_kpi.empty())
                write_file(solve_kpi, kpi_csv_header() + "\n" + kpi_csv_row(kpi) + "\n");
            logln(1, "best objective " + std::to_string(res.best.objective_cache) + ", " +
                         std::to_string(kpi.n_reject) + " rejected, wrote " + solve_out);
            return 0;
        }
        if (*check_cmd) {
            const Instance inst = load_instance(check_instance);
            const ExpandedTransitGraph graph = build_transit_graph(inst);
            const Solution sol = load_solution(inst, graph, check_solution);
            const VerifyReport rep = verify(inst, graph, sol);
            if (rep.ok()) {
                std::cout << "OK: all constraints satisfied, objective " << rep.recomputed_objective
                          << "\n";
                return 0;
            }
            std::cout << rep.to_string();
            std::cout << rep.violations.size() << " violation(s)\n";
            return 1;
        }
        if (*kpi_cmd) {
            const Instance inst = load_instance(kpi_instance);
            const ExpandedTransitGraph graph = build_transit_graph(inst);
            const Solution sol = load_solution(inst, graph, kpi_solution);
            const KpiReport k = compute_kpis(inst, graph, sol);
            const std::string text = kpi_csv_header() + "\n" + kpi_csv_row(k) + "\n";
            if (kpi_csv.empty())
                std::cout << text;
            else
                write_file(kpi_csv, text);
            return 0;
        }
        if (*sweep_cmd) {
            SweepSpec spec;
            spec.axis = sweep_axis;
            spec.values = parse_values(sweep_values);
            spec.runs = sweep_runs;
            spec.jobs = sweep_jobs;
            SearchConfig cfg = SearchConfig::from_params(sweep_cfg.params, sweep_seed);
            if (sweep_iters > 0) cfg.n_iter = sweep_iters;
            const std::string csv = sweep(sweep_cfg, sweep_seed, cfg, spec);
            write_file(sweep_out, csv);
            logln(1, "sweep over " + sweep_axis + " -> " + sweep_out);
            return 0;
        }
        if (*oracle_cmd) {
            const Instance inst = load_instance(oracle_instance);
            const ExpandedTransitGraph graph = build_transit_graph(inst);
            if (!oracle_verify.empty()) {
                const Solution sol = load_solution(inst, graph, oracle_verify);
                const VerifyReport rep = verify(inst, graph, sol);
                if (rep.ok()) {
                    std::cout << "OK\n";
                    return 0;
                }
                std::cout << rep.to_string();
                return 1;
            }
            if (oracle_exact) {
                const ExactResult res = brute_force_solve(inst, graph);
                std::cout << "optimum " << res.best.objective_cache << "\n";
                if (!oracle_exact_out.empty()) save_solution(inst, graph, res.best, oracle_exact_out);
                return 0;
            }
            std::cerr << "oracle: pass --verify <solution> or --exact\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
