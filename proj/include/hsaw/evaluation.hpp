#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hsaw/graph.hpp"
#include "hsaw/prng.hpp"
#include "hsaw/types.hpp"

namespace hsaw {

// Edges or nodes to delete; removing a node removes all incident edges.
struct RemovalSet {
    ItemKind kind = ItemKind::Edge;
    std::vector<std::uint32_t> ids;

    void validate(const ProbGraph& g) const;
};

// One forward diffusion run: draw the seed set, draw one live in-edge per
// node, count nodes reachable from the seeds.
std::uint32_t lt_forward_simulate(const ProbGraph& g, const SuspectSet& vi,
                                  PrgState& s);

struct SuspensionEstimate {
    double value = 0;
    bool capped = false;       // draw cap hit before the stopping rule fired
    std::uint64_t runs = 0;
};

// (eps, delta) relative-error estimate of the influence suspension using
// paired runs with shared draws on the original and residual graph.
SuspensionEstimate estimate_suspension(const ProbGraph& g,
                                       const SuspectSet& vi,
                                       const RemovalSet& removal, double epsilon,
                                       double delta, PrgState& s);

// Exact suspension by enumerating every live-edge realization and every seed
// realization. Feasibility guard: prod(d_in+1) * 2^|V_I| <= 10^7.
double brute_force_suspension(const ProbGraph& g, const SuspectSet& vi,
                              const RemovalSet& removal);

enum class BaselineKind { Pagerank, MaxDegree, Randomized, InfMaxV, InfMaxVI };

RemovalSet baseline(const ProbGraph& g, const SuspectSet& vi, BaselineKind kind,
                    ItemKind mode, std::uint32_t k, PrgState& s,
                    std::uint32_t infmax_samples = 100000);

std::vector<double> pagerank_scores(const ProbGraph& g, double damping = 0.85,
                                    double tol = 1e-10, int max_iters = 200);

struct SolutionAnalysis {
    double ssr = 0;   // fraction of the solution drawn from the suspect set
    double cost = 0;  // sum (1-p(v)) ln(d_in(v)+1)
};

SolutionAnalysis analyze_solution(const ProbGraph& g, const SuspectSet& vi,
                                  const RemovalSet& removal);

struct SweepRow {
    std::string method;
    std::uint32_t k = 0;
    double suspension = 0;
};

void write_suspension_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace hsaw
