#include "hsaw/interdiction.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

namespace hsaw {

namespace {

InterdictionResult run_interdiction(const ProbGraph& g, const SuspectSet& vi,
                                    const CandidateSet& cand, std::uint32_t k,
                                    double epsilon, double delta,
                                    const InterdictionOptions& opts) {
    cand.validate(g);
    if (k < 1 || k > cand.size(g))
        throw std::invalid_argument("budget k must be in [1, |C|]");

    auto t0 = std::chrono::steady_clock::now();
    Schedule sched = compute_schedule(g, cand.kind, k, epsilon, delta);
    std::uint64_t lam = sched.lambda_samples();

    SampleStream stream(g, vi, opts.seed, opts.workers, opts.sampler);

    InterdictionResult res;
    res.kind = cand.kind;
    res.k = k;
    res.epsilon = epsilon;
    res.delta = delta;

    std::uint64_t size = 0;
    GreedyResult greedy;
    CheckResult chk;
    std::uint32_t t = 0;
    for (;;) {
        ++t;
        size = lam << (t - 1);
        stream.ensure(2 * size);
        auto r = stream.prefix(0, size);
        auto r_prime = stream.prefix(size, size);
        CoverageIndex idx_r(cand.kind, r, cand, g);
        CoverageIndex idx_rp(cand.kind, r_prime, cand, g);
        greedy = greedy_max_cover(idx_r, k);
        chk = check_solution(greedy.solution, idx_r, idx_rp, sched, t);
        if (chk.pass || static_cast<double>(size) >= sched.n_max) break;
    }

    res.solution = greedy.solution;
    res.coverage = greedy.coverage;
    res.samples_used = 2 * size;
    res.iterations = t;
    res.passed_check = chk.pass;
    auto counters = stream.counters_for(2 * size);
    res.attempts = counters.attempts;

    double influence = static_cast<double>(g.n) *
                       static_cast<double>(counters.accepted) /
                       static_cast<double>(counters.attempts);
    res.est_suspension = influence * static_cast<double>(greedy.coverage) /
                         static_cast<double>(size);

    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return res;
}

}  // namespace

InterdictionResult esia(const ProbGraph& g, const SuspectSet& vi,
                        const CandidateSet& cand, std::uint32_t k,
                        double epsilon, double delta,
                        const InterdictionOptions& opts) {
    if (cand.kind != ItemKind::Edge)
        throw std::invalid_argument("esia requires an edge candidate set");
    return run_interdiction(g, vi, cand, k, epsilon, delta, opts);
}

InterdictionResult nsia(const ProbGraph& g, const SuspectSet& vi,
                        const CandidateSet& cand, std::uint32_t k,
                        double epsilon, double delta,
                        const InterdictionOptions& opts) {
    if (cand.kind != ItemKind::Node)
        throw std::invalid_argument("nsia requires a node candidate set");
    return run_interdiction(g, vi, cand, k, epsilon, delta, opts);
}

std::string to_json(const InterdictionResult& r, bool include_timing) {
    nlohmann::json j;
    j["kind"] = to_string(r.kind);
    j["k"] = r.k;
    j["epsilon"] = r.epsilon;
    j["delta"] = r.delta;
    j["solution"] = r.solution;
    j["est_suspension"] = r.est_suspension;
    j["coverage"] = r.coverage;
    j["samples_used"] = r.samples_used;
    j["attempts"] = r.attempts;
    j["iterations"] = r.iterations;
    j["passed_check"] = r.passed_check;
    if (include_timing) j["wall_time_s"] = r.wall_time_s;
    return j.dump(2);
}

}  // namespace hsaw
