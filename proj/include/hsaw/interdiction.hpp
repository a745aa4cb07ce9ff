#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsaw/coverage.hpp"
#include "hsaw/graph.hpp"
#include "hsaw/sampler.hpp"
#include "hsaw/types.hpp"

namespace hsaw {

struct InterdictionResult {
    ItemKind kind = ItemKind::Edge;
    std::uint32_t k = 0;
    double epsilon = 0;
    double delta = 0;
    std::vector<std::uint32_t> solution;  // selection order, size k
    double est_suspension = 0;            // expected suppressed nodes
    std::uint64_t coverage = 0;           // samples hit in the final R_t
    std::uint64_t samples_used = 0;       // |R_t| + |R'_t| at exit
    std::uint64_t attempts = 0;
    std::uint32_t iterations = 0;
    bool passed_check = false;
    double wall_time_s = 0;
};

struct InterdictionOptions {
    std::uint32_t workers = 1;
    std::uint64_t seed = 0;
    SamplerConfig sampler;
};

// Doubling loop: greedy on the sample prefix, out-of-sample check, stop on
// pass or once the guard N_max is reached.
InterdictionResult esia(const ProbGraph& g, const SuspectSet& vi,
                        const CandidateSet& cand, std::uint32_t k,
                        double epsilon, double delta,
                        const InterdictionOptions& opts = {});

InterdictionResult nsia(const ProbGraph& g, const SuspectSet& vi,
                        const CandidateSet& cand, std::uint32_t k,
                        double epsilon, double delta,
                        const InterdictionOptions& opts = {});

std::string to_json(const InterdictionResult& r, bool include_timing = true);

}  // namespace hsaw
