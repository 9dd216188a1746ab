#pragma once

#include <set>
#include <string>
#include <vector>

#include "eidarp/insertion.hpp"
#include "eidarp/rng.hpp"
#include "eidarp/solution.hpp"

namespace eidarp {

struct SearchConfig {
    int n_iter = 600;
    double t_max_factor = 1.0;
    double t_red = 700.0;
    double xi_max = 0.25;
    double alpha_ls = 1.06;
    std::uint64_t seed = 1;
    std::set<std::string> disabled_ops;  // operator names, for ablations

    static SearchConfig from_params(const Params& p, std::uint64_t seed) {
        SearchConfig c;
        c.n_iter = p.n_iter;
        c.t_max_factor = p.t_max_factor;
        c.t_red = p.t_red;
        c.xi_max = p.xi_max;
        c.alpha_ls = p.alpha_ls;
        c.seed = seed;
        return c;
    }
    void validate() const;
};

struct SearchResult {
    Solution best;
    std::vector<double> best_trace;  // best objective after each iteration (index 0 = initial)
    double runtime_s = 0.0;
};

extern const std::vector<std::string> kDestroyOps;
extern const std::vector<std::string> kRepairOps;
extern const std::vector<std::string> kLocalSearchOps;

// Initial construction: transit-eligible customers sorted by earliest origin
// window, options 1-4 tried in ascending order, bus-only as fallback.
Solution construct_initial(const Instance& inst, const ExpandedTransitGraph& graph);

// Relatedness of two served customers (spatial + temporal + shared-TP terms,
// inverted). Guards: an empty TP union zeroes the third term; a zero sum caps
// the value at 1e9.
double relatedness(const Instance& inst, const ExpandedTransitGraph& graph, const Solution& sol,
                   int a, int b);

// Destroy: removes customers per the operator and returns everything that
// left the solution (including cascade-unloaded customers).
std::vector<int> destroy(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                         const std::string& op, int n_destroy, Rng& rng);

// Repair: reinserts unserved customers; those without a profitable feasible
// placement stay rejected.
void repair(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
            const std::string& op, std::vector<int> unserved, Rng& rng);

// One ordered pass over the five local-search operators, first improvement,
// repeated until a full pass yields no improvement.
bool local_search(const Instance& inst, const ExpandedTransitGraph& graph, Solution& sol,
                  const std::set<std::string>& disabled);

SearchResult run_search(const Instance& inst, const ExpandedTransitGraph& graph,
                        const SearchConfig& config);

// Independent seeded searches (seed, seed+1, ...), reduced by best objective;
// ties broken by the lower seed. jobs > 1 parallelizes the runs.
SearchResult run_multi(const Instance& inst, const ExpandedTransitGraph& graph,
                       const SearchConfig& config, int runs, int jobs = 1);

}  // namespace eidarp
