#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hsaw/graph.hpp"
#include "hsaw/sampler.hpp"
#include "hsaw/types.hpp"

namespace hsaw {

// Inverted + forward index between candidate items (edges or nodes) and the
// samples that contain them.
class CoverageIndex {
public:
    CoverageIndex(ItemKind kind, std::span<const HsawSample> samples,
                  const CandidateSet& cand, const ProbGraph& g);

    // Raw item-set variant (reverse-reachable node sets from the baselines).
    CoverageIndex(std::span<const std::vector<std::uint32_t>> item_sets,
                  const CandidateSet& cand, const ProbGraph& g);

    ItemKind kind() const { return kind_; }
    std::uint32_t num_samples() const { return num_samples_; }
    const std::vector<std::uint32_t>& candidates() const { return candidates_; }
    std::span<const std::uint32_t> samples_of(std::uint32_t item) const {
        return by_item_[item];
    }
    const std::vector<std::vector<std::uint32_t>>& forward() const {
        return forward_;
    }

    // Number of distinct samples containing at least one of the items.
    std::uint64_t coverage_of(std::span<const std::uint32_t> items) const;

private:
    void insert(std::uint32_t sample_id, std::uint32_t item);

    ItemKind kind_ = ItemKind::Edge;
    std::uint32_t num_samples_ = 0;
    std::vector<std::vector<std::uint32_t>> by_item_;   // item -> sample ids
    std::vector<std::vector<std::uint32_t>> forward_;   // sample -> items
    std::vector<std::uint8_t> is_candidate_;
    std::vector<std::uint32_t> candidates_;  // sorted candidate item ids
};

struct GreedyResult {
    std::vector<std::uint32_t> solution;  // selection order
    std::uint64_t coverage = 0;
};

// Greedy maximum coverage with lazy (CELF-style) marginal re-evaluation.
// Ties break to the smallest item id; zero-gain slots are filled the same
// way, so the output matches the naive reference exactly.
GreedyResult greedy_max_cover(const CoverageIndex& idx, std::uint32_t k);

// Reference implementation: full rescan per iteration.
GreedyResult greedy_max_cover_naive(const CoverageIndex& idx, std::uint32_t k);

// Sample-size schedule for the doubling loop and the confidence check.
struct Schedule {
    double epsilon = 0;
    double delta = 0;
    std::uint32_t k = 0;
    double lambda = 0;
    double lambda1 = 0;
    double n_max = 0;
    std::uint32_t t_max = 1;

    std::uint64_t lambda_samples() const;
};

// ln C(M, k) as an exact log-sum.
double ln_choose(std::uint64_t M, std::uint64_t k);

Schedule compute_schedule_m(std::uint64_t M, std::uint32_t k, double epsilon,
                            double delta);
Schedule compute_schedule(const ProbGraph& g, ItemKind kind, std::uint32_t k,
                          double epsilon, double delta);

struct CheckResult {
    bool pass = false;
    double eps_t = 0;
};

// Out-of-sample confidence test: accepts the candidate solution when the
// combined error bound eps_t falls below epsilon.
CheckResult check_solution(std::span<const std::uint32_t> solution,
                           const CoverageIndex& idx_r,
                           const CoverageIndex& idx_r_prime,
                           const Schedule& sched, std::uint32_t t);

}  // namespace hsaw
