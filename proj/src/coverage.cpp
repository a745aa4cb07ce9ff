#include "hsaw/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace hsaw {

namespace {

std::vector<std::uint8_t> candidate_mask(const CandidateSet& cand,
                                         std::uint32_t limit) {
    std::vector<std::uint8_t> mask(limit, 0);
    if (cand.ids) {
        for (std::uint32_t id : *cand.ids) {
            if (id >= limit)
                throw DataError("candidate id out of range: " +
                                std::to_string(id));
            mask[id] = 1;
        }
    } else {
        std::fill(mask.begin(), mask.end(), 1);
    }
    return mask;
}

}  // namespace

void CoverageIndex::insert(std::uint32_t sample_id, std::uint32_t item) {
    if (!is_candidate_[item]) return;
    by_item_[item].push_back(sample_id);
    forward_[sample_id].push_back(item);
}

CoverageIndex::CoverageIndex(ItemKind kind,
                             std::span<const HsawSample> samples,
                             const CandidateSet& cand, const ProbGraph& g)
    : kind_(kind), num_samples_(static_cast<std::uint32_t>(samples.size())) {
    if (cand.kind != kind)
        throw std::invalid_argument("candidate kind does not match index kind");
    std::uint32_t limit = kind == ItemKind::Edge ? g.m : g.n;
    is_candidate_ = candidate_mask(cand, limit);
    by_item_.resize(limit);
    forward_.resize(samples.size());
    for (std::uint32_t sid = 0; sid < samples.size(); ++sid) {
        const HsawSample& s = samples[sid];
        if (kind == ItemKind::Edge) {
            for (EdgeId e : s.edge_ids) insert(sid, e);
        } else {
            for (NodeId v : s.nodes) insert(sid, v);
        }
    }
    candidates_.reserve(limit);
    for (std::uint32_t i = 0; i < limit; ++i)
        if (is_candidate_[i]) candidates_.push_back(i);
}

CoverageIndex::CoverageIndex(
    std::span<const std::vector<std::uint32_t>> item_sets,
    const CandidateSet& cand, const ProbGraph& g)
    : kind_(cand.kind),
      num_samples_(static_cast<std::uint32_t>(item_sets.size())) {
    std::uint32_t limit = kind_ == ItemKind::Edge ? g.m : g.n;
    is_candidate_ = candidate_mask(cand, limit);
    by_item_.resize(limit);
    forward_.resize(item_sets.size());
    for (std::uint32_t sid = 0; sid < item_sets.size(); ++sid)
        for (std::uint32_t item : item_sets[sid]) insert(sid, item);
    candidates_.reserve(limit);
    for (std::uint32_t i = 0; i < limit; ++i)
        if (is_candidate_[i]) candidates_.push_back(i);
}

std::uint64_t CoverageIndex::coverage_of(
    std::span<const std::uint32_t> items) const {
    std::vector<std::uint8_t> covered(num_samples_, 0);
    std::uint64_t count = 0;
    for (std::uint32_t item : items) {
        for (std::uint32_t sid : by_item_[item]) {
            if (!covered[sid]) {
                covered[sid] = 1;
                ++count;
            }
        }
    }
    return count;
}

GreedyResult greedy_max_cover(const CoverageIndex& idx, std::uint32_t k) {
    const auto& cands = idx.candidates();
    if (k > cands.size())
        throw std::invalid_argument("budget k exceeds candidate count");

    struct Entry {
        std::uint64_t gain;
        std::uint32_t item;
        std::uint32_t stamp;
    };
    struct Worse {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.gain != b.gain) return a.gain < b.gain;
            return a.item > b.item;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, Worse> heap;
    for (std::uint32_t item : cands)
        heap.push({idx.samples_of(item).size(), item, 0});

    std::vector<std::uint8_t> covered(idx.num_samples(), 0);
    GreedyResult res;
    res.solution.reserve(k);
    std::vector<std::uint8_t> selected(cands.empty() ? 0 : cands.back() + 1, 0);

    for (std::uint32_t iter = 0; iter < k; ++iter) {
        for (;;) {
            Entry top = heap.top();
            heap.pop();
            if (selected[top.item]) continue;
            if (top.stamp != iter) {
                std::uint64_t gain = 0;
                for (std::uint32_t sid : idx.samples_of(top.item))
                    if (!covered[sid]) ++gain;
                heap.push({gain, top.item, iter});
                continue;
            }
            // fresh: stale entries elsewhere are upper bounds, so this is the
            // true argmax with smallest-id tie-break
            res.solution.push_back(top.item);
            selected[top.item] = 1;
            res.coverage += top.gain;
            for (std::uint32_t sid : idx.samples_of(top.item)) covered[sid] = 1;
            break;
        }
    }
    return res;
}

GreedyResult greedy_max_cover_naive(const CoverageIndex& idx, std::uint32_t k) {
    const auto& cands = idx.candidates();
    if (k > cands.size())
        throw std::invalid_argument("budget k exceeds candidate count");
    std::vector<std::uint8_t> covered(idx.num_samples(), 0);
    std::vector<std::uint8_t> selected(cands.empty() ? 0 : cands.back() + 1, 0);
    GreedyResult res;
    for (std::uint32_t iter = 0; iter < k; ++iter) {
        std::uint64_t best_gain = 0;
        std::uint32_t best_item = kInvalidNode;
        for (std::uint32_t item : cands) {
            if (selected[item]) continue;
            std::uint64_t gain = 0;
            for (std::uint32_t sid : idx.samples_of(item))
                if (!covered[sid]) ++gain;
            if (best_item == kInvalidNode || gain > best_gain) {
                best_gain = gain;
                best_item = item;
            }
        }
        res.solution.push_back(best_item);
        selected[best_item] = 1;
        res.coverage += best_gain;
        for (std::uint32_t sid : idx.samples_of(best_item)) covered[sid] = 1;
    }
    return res;
}

double ln_choose(std::uint64_t M, std::uint64_t k) {
    double s = 0.0;
    for (std::uint64_t i = 1; i <= k; ++i)
        s += std::log(static_cast<double>(M - k + i) / static_cast<double>(i));
    return s;
}

std::uint64_t Schedule::lambda_samples() const {
    return static_cast<std::uint64_t>(std::ceil(lambda));
}

Schedule compute_schedule_m(std::uint64_t M, std::uint32_t k, double epsilon,
                            double delta) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must be in (0,1)");
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("delta must be in (0,1)");
    if (k < 1 || k > M)
        throw std::invalid_argument("budget k out of range");

    Schedule s;
    s.epsilon = epsilon;
    s.delta = delta;
    s.k = k;
    double c = (2.0 - 1.0 / std::exp(1.0)) * (2.0 - 1.0 / std::exp(1.0));
    double a = 2.0 + 2.0 * epsilon / 3.0;
    double eps2 = epsilon * epsilon;
    s.n_max = c * a * static_cast<double>(M) *
              (std::log(6.0 / delta) + ln_choose(M, k)) /
              (static_cast<double>(k) * eps2);
    double lambda0 = a * std::log(3.0 / delta) / eps2;
    double t = std::ceil(std::log2(2.0 * s.n_max / lambda0));
    s.t_max = t < 1.0 ? 1 : static_cast<std::uint32_t>(t);
    s.lambda = a * std::log(3.0 * s.t_max / delta) / eps2;
    s.lambda1 = 1.0 + (1.0 + epsilon) * a * std::log(3.0 * s.t_max / delta) / eps2;
    return s;
}

Schedule compute_schedule(const ProbGraph& g, ItemKind kind, std::uint32_t k,
                          double epsilon, double delta) {
    return compute_schedule_m(kind == ItemKind::Edge ? g.m : g.n, k, epsilon,
                              delta);
}

CheckResult check_solution(std::span<const std::uint32_t> solution,
                           const CoverageIndex& idx_r,
                           const CoverageIndex& idx_r_prime,
                           const Schedule& sched, std::uint32_t t) {
    double cov_r = static_cast<double>(idx_r.coverage_of(solution));
    double cov_rp = static_cast<double>(idx_r_prime.coverage_of(solution));
    if (cov_rp < sched.lambda1)
        return {false, std::numeric_limits<double>::infinity()};

    double eps = sched.epsilon;
    double pow2 = std::ldexp(1.0, static_cast<int>(t) - 1);
    double n_rp = static_cast<double>(idx_r_prime.num_samples());
    double one_me = 1.0 - 1.0 / std::exp(1.0);
    double eps1 = cov_r / cov_rp - 1.0;
    double eps2 = eps * std::sqrt(n_rp * (1.0 + eps) / (pow2 * cov_rp));
    double eps3 = eps * std::sqrt(n_rp * (1.0 + eps) * (one_me - eps) /
                                  ((1.0 + eps / 3.0) * pow2 * cov_rp));
    double eps_t = (eps1 + eps2 + eps1 * eps2) * (one_me - eps) + one_me * eps3;
    return {eps_t <= eps, eps_t};
}

}  // namespace hsaw
