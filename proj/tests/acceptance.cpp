// Acceptance suite: one check per release criterion, each printing a
// PASS/FAIL line. The throughput check is advisory (hardware-bound) and does
// not gate the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <thread>
#include <string>
#include <vector>

#include "hsaw/coverage.hpp"
#include "hsaw/evaluation.hpp"
#include "hsaw/graph.hpp"
#include "hsaw/interdiction.hpp"
#include "hsaw/partition.hpp"
#include "hsaw/sampler.hpp"
#include "oracles.hpp"

using namespace hsaw;
using namespace hsaw::testing;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what,
            const std::string& detail, bool soft = false) {
    std::printf("[%2d] %s%s %s — %s\n", id, pass ? "PASS" : "FAIL",
                soft ? " (soft)" : "", what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass && !soft) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// 1. empirical walk frequencies match the exact walk law
void criterion_walk_law() {
    auto t0 = std::chrono::steady_clock::now();
    ProbGraph g = law_fixture_graph();
    SuspectSet vi = law_fixture_suspects(g);
    auto walks = enumerate_hsaws(g, vi);
    double total = total_hit_mass(walks);
    std::map<std::string, double> expected;
    for (const auto& w : walks) expected[walk_key(w.nodes)] = w.mass / total;

    const std::uint64_t target = 1000000;
    SamplePool pool = stream_samples(g, vi, 2, target, 12345);
    std::map<std::string, std::uint64_t> freq;
    for (const auto& s : pool.samples) freq[walk_key(s.nodes)]++;

    double worst = 0;
    bool alien = false;
    for (const auto& [key, count] : freq)
        if (!expected.count(key)) alien = true;
    for (const auto& [key, p] : expected) {
        double observed =
            freq.count(key) ? freq[key] / double(pool.samples.size()) : 0.0;
        worst = std::max(worst, std::abs(observed - p));
    }
    double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu distinct walks, max |freq - law| = %.5f (tol 0.005), "
                  "%.1fs", expected.size(), worst, secs);
    report(1, !alien && worst < 0.005 && secs < 30.0, "walk-law fidelity",
           buf);
}

// 2. suspension identity: exact D equals influence x interdiction rate
void criterion_identity() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(777);
    double worst = 0;
    int checked = 0;
    for (int inst = 0; inst < 20; ++inst) {
        NodeId n = 6 + inst % 3;  // 6..8 nodes
        ProbGraph g = random_instance(9000 + inst, n, 12);
        SuspectSet vi = random_instance_suspects(g, 9000 + inst, 2 + inst % 2);
        auto walks = enumerate_hsaws(g, vi);
        double influence_true = total_hit_mass(walks);
        if (influence_true < 0.2) continue;  // nearly nothing to interdict

        SamplePool pool = stream_samples(g, vi, 2, 1000000, inst);
        double i_hat = estimate_influence(pool, g.n);

        for (ItemKind kind : {ItemKind::Edge, ItemKind::Node}) {
            std::uint32_t limit = kind == ItemKind::Edge ? g.m : g.n;
            for (int t = 0; t < 5; ++t) {
                // removal sets with a non-degenerate denominator
                std::vector<std::uint32_t> ids;
                double exact = 0;
                for (int tries = 0; tries < 200; ++tries) {
                    ids = random_ids(rng, limit, kind == ItemKind::Edge ? 3 : 2);
                    exact = exact_suspension(walks, kind, ids);
                    if (exact > 0.05 * influence_true) break;
                }
                if (exact <= 0.05 * influence_true) continue;
                RemovalSet r{kind, ids};
                double cross = brute_force_suspension(g, vi, r);
                // dual-route exactness of the oracle itself
                if (std::abs(cross - exact) > 1e-9 * std::max(1.0, exact)) {
                    report(2, false, "suspension identity",
                           "internal oracle disagreement");
                    return;
                }
                std::uint64_t covered = 0;
                for (const auto& s : pool.samples) {
                    bool hit = false;
                    if (kind == ItemKind::Edge) {
                        for (EdgeId e : s.edge_ids)
                            if (std::count(ids.begin(), ids.end(), e)) hit = true;
                    } else {
                        for (NodeId v : s.nodes)
                            if (std::count(ids.begin(), ids.end(), v)) hit = true;
                    }
                    covered += hit;
                }
                double sampled =
                    i_hat * double(covered) / double(pool.samples.size());
                worst = std::max(worst, std::abs(sampled - exact) / exact);
                ++checked;
            }
        }
    }
    double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d removal sets, worst relative gap %.4f (tol 0.02), %.0fs",
                  checked, worst, secs);
    report(2, checked >= 150 && worst < 0.02 && secs < 300.0,
           "suspension identity (edge and node)", buf);
}

// 3. (1 - 1/e - eps) guarantee against the exhaustive optimum
void criterion_guarantee() {
    auto t0 = std::chrono::steady_clock::now();
    const double bound = 1.0 - 1.0 / std::exp(1.0) - 0.3;
    int edge_ok = 0, node_ok = 0;
    const int instances = 50;
    for (int inst = 0; inst < instances; ++inst) {
        ProbGraph g = random_instance(5000 + inst, 12, 20);
        SuspectSet vi = random_instance_suspects(g, 5000 + inst, 3);
        auto walks = enumerate_hsaws(g, vi);

        auto opt_pairs = [&](ItemKind kind, std::uint32_t limit) {
            double best = 0;
            for (std::uint32_t a = 0; a < limit; ++a)
                for (std::uint32_t b = a + 1; b < limit; ++b)
                    best = std::max(best,
                                    exact_suspension(walks, kind, {a, b}));
            return best;
        };

        InterdictionOptions opts;
        opts.workers = 2;
        opts.seed = 100 + inst;

        auto e_res = esia(g, vi, CandidateSet::all(ItemKind::Edge), 2, 0.3,
                          0.1, opts);
        double e_opt = opt_pairs(ItemKind::Edge, g.m);
        double e_val = exact_suspension(walks, ItemKind::Edge, e_res.solution);
        if (e_val >= bound * e_opt - 1e-12) ++edge_ok;

        auto n_res = nsia(g, vi, CandidateSet::all(ItemKind::Node), 2, 0.3,
                          0.1, opts);
        double n_opt = opt_pairs(ItemKind::Node, g.n);
        double n_val = exact_suspension(walks, ItemKind::Node, n_res.solution);
        if (n_val >= bound * n_opt - 1e-12) ++node_ok;
    }
    double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "edge %d/%d, node %d/%d at >= (1-1/e-0.3) OPT, %.0fs",
                  edge_ok, instances, node_ok, instances, secs);
    report(3,
           edge_ok >= (instances * 9) / 10 && node_ok >= (instances * 9) / 10 &&
               secs < 600.0,
           "approximation guarantee", buf);
}

// 4. encode/decode losslessness at scale
void criterion_losslessness() {
    auto t0 = std::chrono::steady_clock::now();
    ProbGraph g = synth_graph(10000, 10, 2024);
    SuspectSet vi = random_suspects(g, 1000, 2025);

    std::uint64_t checked = 0, mismatches = 0, dropped = 0;
    std::vector<std::vector<NodeId>> recorded;
    WalkObserver obs = [&](const EncodedWalk&, std::span<const NodeId> nodes) {
        recorded.emplace_back(nodes.begin(), nodes.end());
    };
    DecodeContext dc(g, vi);
    std::uint64_t wid = 0;
    while (checked + dropped < 100000) {
        recorded.clear();
        auto walks = thread_sample(g, vi, wid++, 100, {}, &obs);
        for (std::size_t i = 0; i < walks.size(); ++i) {
            auto s = dc.decode(walks[i]);
            if (!s) {
                ++dropped;  // heuristic miss, excluded by the exact recheck
                continue;
            }
            ++checked;
            if (s->nodes != recorded[i]) ++mismatches;
        }
    }
    double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%llu walks decoded, %llu mismatches, %llu cyclic drops, %.0fs",
                  static_cast<unsigned long long>(checked),
                  static_cast<unsigned long long>(mismatches),
                  static_cast<unsigned long long>(dropped), secs);
    report(4, checked >= 100000 - dropped && mismatches == 0,
           "encoding losslessness", buf);
}

// 5. Floyd/Brent/exact verdict agreement on a functional graph
void criterion_detectors() {
    auto t0 = std::chrono::steady_clock::now();
    const NodeId n = 2000;
    PrgState gen{99};
    std::vector<std::tuple<NodeId, NodeId, double>> edges;
    for (NodeId v = 0; v < n; ++v) {
        NodeId u = v;
        while (u == v) u = pick_uniform_node(gen, n);
        edges.emplace_back(u, v, 1.0);
    }
    ProbGraph g = build_graph(n, std::move(edges), WeightMode::Given, 0);
    std::vector<std::pair<NodeId, double>> mem;
    for (NodeId v = 0; v < n; v += 83) mem.emplace_back(v, 1.0);
    SuspectSet vi = SuspectSet::from_members(std::move(mem), g);

    PrgState master{31337};
    int disagreements = 0, accepted = 0;
    for (int i = 0; i < 10000; ++i) {
        PrgState se = master, sf = master, sb = master;
        auto ve = run_attempt_exact(g, vi, se);
        auto vf = run_attempt_with(g, vi, sf, CycleHeuristic::Floyd, 0);
        auto vb = run_attempt_with(g, vi, sb, CycleHeuristic::Brent, 0);
        if (ve.accepted != vf.accepted || ve.accepted != vb.accepted)
            ++disagreements;
        accepted += ve.accepted;
        master = se;
    }
    double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "10000 walks (%d accepted), %d verdict disagreements, %.0fs",
                  accepted, disagreements, secs);
    report(5, disagreements == 0 && accepted > 500, "cycle-detector agreement",
           buf);
}

// 6. monotonicity/submodularity and the greedy bound
void criterion_coverage() {
    auto t0 = std::chrono::steady_clock::now();
    ProbGraph g = synth_graph(500, 5, 55);
    SuspectSet vi = random_suspects(g, 50, 56);
    SamplePool pool = stream_samples(g, vi, 2, 10000, 57);
    CoverageIndex idx(ItemKind::Node, pool.samples,
                      CandidateSet::all(ItemKind::Node), g);

    std::mt19937_64 rng(58);
    std::uniform_int_distribution<std::uint32_t> node(0, g.n - 1);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::set<std::uint32_t> big;
        while (big.size() < 6) big.insert(node(rng));
        std::vector<std::uint32_t> t_big(big.begin(), big.end());
        std::vector<std::uint32_t> t_small(t_big.begin(), t_big.begin() + 3);
        std::uint32_t x = node(rng);
        while (big.count(x)) x = node(rng);
        auto cov = [&](std::vector<std::uint32_t> v) {
            return idx.coverage_of(v);
        };
        auto cov_with = [&](std::vector<std::uint32_t> v, std::uint32_t e) {
            v.push_back(e);
            return idx.coverage_of(v);
        };
        std::uint64_t cs = cov(t_small), cb = cov(t_big);
        if (cs > cb) ++violations;
        if (cov_with(t_small, x) - cs < cov_with(t_big, x) - cb) ++violations;
    }

    // greedy against the exhaustive optimum on 100 small instances
    const double bound = 1.0 - 1.0 / std::exp(1.0);
    int greedy_ok = 0;
    ProbGraph ids = synth_graph(15, 1, 3);  // 15 edge ids
    for (int inst = 0; inst < 100; ++inst) {
        std::uniform_int_distribution<std::uint32_t> n_sets(4, 50);
        std::uniform_int_distribution<std::uint32_t> item(0, ids.m - 1);
        std::uniform_int_distribution<std::uint32_t> set_size(1, 5);
        std::vector<std::vector<std::uint32_t>> sets(n_sets(rng));
        for (auto& s : sets) {
            std::uint32_t sz = set_size(rng);
            for (std::uint32_t i = 0; i < sz; ++i) s.push_back(item(rng));
        }
        CoverageIndex small(sets, CandidateSet::all(ItemKind::Edge), ids);
        std::uint32_t k = 1 + inst % 5;
        auto greedy = greedy_max_cover(small, k);

        std::uint64_t opt = 0;
        std::vector<std::uint32_t> pick(k);
        auto rec = [&](auto&& self, std::uint32_t from, std::uint32_t got)
            -> void {
            if (got == k) {
                opt = std::max(opt, small.coverage_of({pick.data(), k}));
                return;
            }
            for (std::uint32_t i = from; i < ids.m; ++i) {
                pick[got] = i;
                self(self, i + 1, got + 1);
            }
        };
        rec(rec, 0, 0);
        if (double(greedy.coverage) >= bound * double(opt) - 1e-9) ++greedy_ok;
    }
    double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d property violations, greedy bound %d/100, %.0fs",
                  violations, greedy_ok, secs);
    report(6, violations == 0 && greedy_ok == 100, "coverage properties", buf);
}

// 7. estimator calibration at (0.1, 0.1)
void criterion_calibration() {
    auto t0 = std::chrono::steady_clock::now();
    ProbGraph g = two_node_graph();
    SuspectSet vi = two_node_suspects(g);
    RemovalSet r{ItemKind::Edge, {0}};
    const double exact = 0.5;
    PrgState s{4242};
    int ok = 0;
    for (int run = 0; run < 200; ++run) {
        auto est = estimate_suspension(g, vi, r, 0.1, 0.1, s);
        if (std::abs(est.value - exact) / exact <= 0.1) ++ok;
    }
    double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "relative error <= 0.1 in %d/200 runs, %.0fs",
                  ok, secs);
    report(7, ok >= 180, "estimator calibration", buf);
}

// 8. schedule arithmetic against the high-precision reference table
void criterion_schedule() {
    struct Row {
        std::uint64_t m;
        std::uint32_t k;
        double eps, delta, n_max;
        std::uint32_t t_max;
        double lambda, lambda1;
    };
    // values from a 50-digit reference evaluation
    const Row rows[] = {
        {125408, 48, 0.05, 0.3, 2410256469.1504753, 22, 4386.8170710332541, 4607.1579245849168},
        {106151, 31, 0.4, 0.3, 36653695.03352114, 22, 76.409723573325122, 107.97361300265517},
        {174749, 4, 0.15, 0.1, 534400753.30950428, 22, 605.94238460191065, 697.83374229219725},
        {102033, 16, 0.5, 0.2, 24932846.833869706, 21, 53.690677962372575, 81.536016943558863},
        {89355, 2, 0.15, 0.01, 316623966.84901017, 21, 816.50845848876491, 939.98472726207965},
        {46786, 13, 0.4, 0.2, 16384712.901107721, 20, 80.803585057629515, 114.12501908068132},
        {94216, 7, 0.2, 0.05, 146158834.47146474, 21, 380.73957333042793, 457.88748799651352},
        {150784, 47, 0.3, 0.1, 89345981.01872674, 22, 158.69919596716707, 207.3089547573172},
        {92284, 16, 0.2, 0.05, 128679633.05882656, 21, 380.73957333042793, 457.88748799651352},
        {26430, 16, 0.15, 0.3, 55540380.843878685, 19, 489.72224673497871, 564.18058374522551},
        {96962, 40, 0.05, 0.1, 1854168311.408816, 21, 5242.5187864336037, 5505.6447257552839},
        {141202, 12, 0.2, 0.3, 209471863.46760622, 22, 287.66013580545928, 346.19216296655114},
        {110389, 12, 0.2, 0.2, 160429945.52369567, 22, 309.28494157122805, 372.14192988547366},
        {99214, 43, 0.05, 0.1, 1885941653.490302, 21, 5242.5187864336037, 5505.6447257552839},
        {19367, 9, 0.15, 0.1, 42871657.512981198, 19, 592.25939367733561, 682.09830272893595},
        {144460, 17, 0.5, 0.1, 36457184.418926366, 22, 60.594238460191065, 91.891357690286597},
        {182616, 21, 0.1, 0.3, 1015071580.96657, 23, 1123.869723844127, 1237.2566962285397},
        {176404, 12, 0.2, 0.05, 271014335.53585096, 22, 383.22064083095555, 460.86476899714666},
        {140207, 10, 0.05, 0.05, 3286517290.1815526, 21, 5806.2784932890259, 6097.5924179534772},
        {21934, 4, 0.15, 0.01, 58898018.951937109, 18, 802.12106170488747, 923.43922096062059},
    };
    double worst = 0;
    bool structural = true;
    for (const Row& r : rows) {
        Schedule s = compute_schedule_m(r.m, r.k, r.eps, r.delta);
        worst = std::max(worst, std::abs(s.n_max - r.n_max) / r.n_max);
        worst = std::max(worst, std::abs(s.lambda - r.lambda) / r.lambda);
        worst = std::max(worst, std::abs(s.lambda1 - r.lambda1) / r.lambda1);
        structural = structural && s.t_max == r.t_max && s.lambda1 > s.lambda &&
                     s.t_max >= 1;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "20 tuples, worst relative deviation %.2e (tol 5e-10)",
                  worst);
    report(8, structural && worst < 5e-10, "schedule arithmetic", buf);
}

// 9. crossing fraction is monotone in the extension parameter
void criterion_distributed() {
    auto t0 = std::chrono::steady_clock::now();
    ProbGraph g = synth_graph(10000, 10, 31415);
    SuspectSet vi = random_suspects(g, 1000, 31416);
    Partitioning base = partition_graph(g, 2, PartitionMethod::LabelProp, 7);
    double frac[3] = {0, 0, 0};
    for (std::uint32_t h : {0u, 1u, 2u}) {
        Partitioning part = extend_partition(g, base, h);
        auto res = distributed_sample(g, vi, part, 20000, 9, 2);
        frac[h] = res.crossing_fraction;
    }
    double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "crossing fractions h0=%.4f h1=%.4f h2=%.4f, %.0fs", frac[0],
                  frac[1], frac[2], secs);
    report(9, frac[2] <= frac[1] && frac[1] <= frac[0],
           "distributed crossing monotonicity", buf);
}

// 10. advisory throughput smoke (hardware dependent, does not gate)
void criterion_throughput() {
    auto t0 = std::chrono::steady_clock::now();
    ProbGraph g = synth_graph(100000, 10, 271828);
    SuspectSet vi = random_suspects(g, 1000, 271829);

    auto rate = [&](std::uint32_t workers) {
        auto start = std::chrono::steady_clock::now();
        SamplePool pool = stream_samples(g, vi, workers, 20000, 5);
        double secs = elapsed_s(start);
        return static_cast<double>(pool.attempts) / secs;
    };
    double single = rate(1);
    double two = rate(2);
    double eight = rate(8);
    double secs = elapsed_s(t0);
    unsigned cores = std::thread::hardware_concurrency();
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "%.2e attempts/s single, %.2fx at 2 workers, %.2fx at 8 "
                  "workers (%u hardware cores), %.0fs",
                  single, two / single, eight / single, cores, secs);
    report(10, single >= 1e5 && eight / single >= 4.0, "throughput smoke", buf,
           /*soft=*/true);
}

// 11. interdiction beats every baseline on average
void criterion_baselines() {
    auto t0 = std::chrono::steady_clock::now();
    const int instances = 50;
    const std::uint32_t k = 2;
    std::map<std::string, double> mean_edge, mean_node;
    double esia_mean = 0, nsia_mean = 0;
    const std::pair<std::string, BaselineKind> baselines[] = {
        {"pagerank", BaselineKind::Pagerank},
        {"maxdegree", BaselineKind::MaxDegree},
        {"randomized", BaselineKind::Randomized},
        {"infmax-v", BaselineKind::InfMaxV},
        {"infmax-vi", BaselineKind::InfMaxVI},
    };
    for (int inst = 0; inst < instances; ++inst) {
        ProbGraph g = random_instance(8000 + inst, 12, 20);
        SuspectSet vi = random_instance_suspects(g, 8000 + inst, 3);
        auto walks = enumerate_hsaws(g, vi);

        InterdictionOptions opts;
        opts.workers = 2;
        opts.seed = 300 + inst;
        auto e_res =
            esia(g, vi, CandidateSet::all(ItemKind::Edge), k, 0.3, 0.1, opts);
        esia_mean += exact_suspension(walks, ItemKind::Edge, e_res.solution);
        auto n_res =
            nsia(g, vi, CandidateSet::all(ItemKind::Node), k, 0.3, 0.1, opts);
        nsia_mean += exact_suspension(walks, ItemKind::Node, n_res.solution);

        for (const auto& [name, kind] : baselines) {
            PrgState s{static_cast<std::uint64_t>(inst) * 31 + 5};
            RemovalSet re = baseline(g, vi, kind, ItemKind::Edge, k, s, 20000);
            mean_edge[name] +=
                exact_suspension(walks, ItemKind::Edge, re.ids);
            RemovalSet rn = baseline(g, vi, kind, ItemKind::Node, k, s, 20000);
            mean_node[name] +=
                exact_suspension(walks, ItemKind::Node, rn.ids);
        }
    }
    bool pass = true;
    std::string worst_name;
    for (const auto& [name, total] : mean_edge) {
        if (esia_mean < total) {
            pass = false;
            worst_name = "edge/" + name;
        }
    }
    for (const auto& [name, total] : mean_node) {
        if (nsia_mean < total) {
            pass = false;
            worst_name = "node/" + name;
        }
    }
    double secs = elapsed_s(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "mean D: esia %.3f nsia %.3f vs best baselines edge %.3f "
                  "node %.3f%s%s, %.0fs",
                  esia_mean / instances, nsia_mean / instances,
                  std::max_element(mean_edge.begin(), mean_edge.end(),
                                   [](auto& a, auto& b) {
                                       return a.second < b.second;
                                   })
                          ->second /
                      instances,
                  std::max_element(mean_node.begin(), mean_node.end(),
                                   [](auto& a, auto& b) {
                                       return a.second < b.second;
                                   })
                          ->second /
                      instances,
                  pass ? "" : ", beaten by ", pass ? "" : worst_name.c_str(),
                  secs);
    report(11, pass, "baseline ordering", buf);
}

}  // namespace

int main() {
    criterion_walk_law();
    criterion_identity();
    criterion_guarantee();
    criterion_losslessness();
    criterion_detectors();
    criterion_coverage();
    criterion_calibration();
    criterion_schedule();
    criterion_distributed();
    criterion_throughput();
    criterion_baselines();
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all gating criteria passed\n");
    return 0;
}
