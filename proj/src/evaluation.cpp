#include "hsaw/evaluation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "hsaw/coverage.hpp"
#include "hsaw/sampler.hpp"

namespace hsaw {

namespace {

constexpr EdgeId kNoEdge = ~EdgeId(0);
constexpr std::uint64_t kDrawCap = 1'000'000'000;

// Shared realization + reachability scratch for paired runs.
struct SimContext {
    std::vector<std::uint8_t> in_x;       // drawn seed set
    std::vector<EdgeId> choice;           // live in-edge per node (or none)
    std::vector<std::uint8_t> node_gone;  // removal filters
    std::vector<std::uint8_t> edge_gone;
    std::vector<std::int8_t> status;
    std::vector<NodeId> stack;

    explicit SimContext(const ProbGraph& g)
        : in_x(g.n, 0),
          choice(g.n, kNoEdge),
          node_gone(g.n, 0),
          edge_gone(g.m, 0),
          status(g.n, -1) {}

    void set_removal(const ProbGraph& g, const RemovalSet& r) {
        if (r.kind == ItemKind::Edge) {
            for (std::uint32_t e : r.ids) edge_gone[e] = 1;
        } else {
            for (std::uint32_t v : r.ids) node_gone[v] = 1;
            for (EdgeId e = 0; e < g.m; ++e)
                if (node_gone[g.in_src[e]] || node_gone[g.edge_dst[e]])
                    edge_gone[e] = 1;
        }
    }
};

// Draw order is fixed: suspects ascending, then one edge draw per node
// ascending, so paired evaluations share the realization exactly.
void draw_realization(const ProbGraph& g, const SuspectSet& vi, PrgState& s,
                      SimContext& ctx) {
    std::fill(ctx.in_x.begin(), ctx.in_x.end(), 0);
    for (const auto& [v, p] : vi.members)
        if (u01(prg_next(s)) <= p) ctx.in_x[v] = 1;
    for (NodeId v = 0; v < g.n; ++v) {
        auto pick = pick_live_in_edge(s, g, v);
        ctx.choice[v] = pick ? pick->edge : kNoEdge;
    }
}

// Count infected nodes by chasing each node's unique live parent chain.
// `residual` applies the removal filters to the same realization; a choice
// whose edge is removed becomes "no edge", which preserves the residual
// graph's marginal law and keeps the infected set monotone.
std::uint32_t count_infected(const ProbGraph& g, SimContext& ctx,
                             bool residual) {
    constexpr std::int8_t kUnknown = -1, kInProgress = -2;
    std::fill(ctx.status.begin(), ctx.status.end(), kUnknown);
    std::uint32_t count = 0;
    for (NodeId v0 = 0; v0 < g.n; ++v0) {
        if (ctx.status[v0] >= 0) {
            count += ctx.status[v0];
            continue;
        }
        ctx.stack.clear();
        NodeId cur = v0;
        std::int8_t verdict;
        for (;;) {
            if (ctx.status[cur] >= 0) {
                verdict = ctx.status[cur];
                break;
            }
            if (ctx.status[cur] == kInProgress) {
                verdict = 0;  // cycle without an infected seed
                break;
            }
            if (residual && ctx.node_gone[cur]) {
                verdict = 0;
                break;
            }
            if (ctx.in_x[cur]) {
                verdict = 1;
                break;
            }
            EdgeId e = ctx.choice[cur];
            if (e == kNoEdge || (residual && ctx.edge_gone[e])) {
                verdict = 0;
                break;
            }
            ctx.status[cur] = kInProgress;
            ctx.stack.push_back(cur);
            cur = g.in_src[e];
        }
        if (ctx.status[cur] < 0) ctx.status[cur] = verdict;
        for (NodeId w : ctx.stack) ctx.status[w] = verdict;
        count += verdict;
    }
    return count;
}

std::vector<std::uint32_t> ranked_by_score(std::span<const double> score) {
    std::vector<std::uint32_t> order(score.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                         if (score[a] != score[b]) return score[a] > score[b];
                         return a < b;
                     });
    return order;
}

// k highest-weight incoming edges of the ranked nodes, taken round-robin.
std::vector<std::uint32_t> edges_into_nodes(
    const ProbGraph& g, std::span<const std::uint32_t> nodes, std::uint32_t k) {
    std::vector<std::vector<EdgeId>> per_node(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        NodeId v = nodes[i];
        std::uint64_t lo = g.in_offsets[v], hi = g.in_offsets[v + 1];
        per_node[i].reserve(hi - lo);
        for (std::uint64_t e = lo; e < hi; ++e)
            per_node[i].push_back(static_cast<EdgeId>(e));
        std::sort(per_node[i].begin(), per_node[i].end(),
                  [&](EdgeId a, EdgeId b) {
                      if (g.weight[a] != g.weight[b])
                          return g.weight[a] > g.weight[b];
                      return a < b;
                  });
    }
    std::vector<std::uint32_t> out;
    std::vector<std::size_t> next(nodes.size(), 0);
    while (out.size() < k) {
        bool advanced = false;
        for (std::size_t i = 0; i < nodes.size() && out.size() < k; ++i) {
            if (next[i] < per_node[i].size()) {
                out.push_back(per_node[i][next[i]++]);
                advanced = true;
            }
        }
        if (!advanced)
            throw DataError("not enough incoming edges among ranked nodes");
    }
    return out;
}

std::vector<std::uint32_t> distinct_uniform(PrgState& s, std::uint32_t limit,
                                            std::uint32_t k) {
    if (k > limit) throw DataError("k exceeds candidate count");
    std::unordered_set<std::uint32_t> seen;
    std::vector<std::uint32_t> out;
    while (out.size() < k) {
        auto x = static_cast<std::uint32_t>(u01(prg_next(s)) * limit);
        if (x >= limit) x = limit - 1;
        if (seen.insert(x).second) out.push_back(x);
    }
    return out;
}

// Reverse-reachable node sets: walks without the hitting requirement,
// terminated by no-edge or a revisit.
std::vector<std::vector<std::uint32_t>> rr_node_sets(const ProbGraph& g,
                                                     PrgState& s,
                                                     std::uint32_t count) {
    std::vector<std::vector<std::uint32_t>> sets;
    sets.reserve(count);
    std::vector<std::uint32_t> mark(g.n, 0);
    for (std::uint32_t i = 1; i <= count; ++i) {
        std::vector<std::uint32_t> set;
        NodeId v = pick_uniform_node(s, g.n);
        set.push_back(v);
        mark[v] = i;
        for (;;) {
            auto pick = pick_live_in_edge(s, g, v);
            if (!pick) break;
            if (mark[pick->src] == i) break;
            v = pick->src;
            set.push_back(v);
            mark[v] = i;
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace

void RemovalSet::validate(const ProbGraph& g) const {
    std::uint32_t limit = kind == ItemKind::Edge ? g.m : g.n;
    for (std::uint32_t id : ids)
        if (id >= limit)
            throw DataError("removal id out of range: " + std::to_string(id));
}

std::uint32_t lt_forward_simulate(const ProbGraph& g, const SuspectSet& vi,
                                  PrgState& s) {
    SimContext ctx(g);
    draw_realization(g, vi, s, ctx);
    return count_infected(g, ctx, false);
}

SuspensionEstimate estimate_suspension(const ProbGraph& g,
                                       const SuspectSet& vi,
                                       const RemovalSet& removal,
                                       double epsilon, double delta,
                                       PrgState& s) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must be in (0,1)");
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("delta must be in (0,1)");
    removal.validate(g);
    if (removal.ids.empty()) return {0.0, false, 0};  // paired runs identical

    SimContext ctx(g);
    ctx.set_removal(g, removal);

    double upsilon = 4.0 * (std::exp(1.0) - 2.0) * std::log(2.0 / delta) *
                     (1.0 + epsilon) / (epsilon * epsilon);
    std::uint64_t draws_per_run = vi.members.size() + g.n;
    std::uint64_t max_runs = std::max<std::uint64_t>(1, kDrawCap / draws_per_run);

    double sum = 0.0;
    std::uint64_t runs = 0;
    while (sum < upsilon) {
        if (runs >= max_runs) return {0.0, true, runs};
        draw_realization(g, vi, s, ctx);
        std::uint32_t full = count_infected(g, ctx, false);
        std::uint32_t residual = count_infected(g, ctx, true);
        assert(full >= residual);
        sum += static_cast<double>(full - residual) / static_cast<double>(g.n);
        ++runs;
    }
    return {static_cast<double>(g.n) * upsilon / static_cast<double>(runs),
            false, runs};
}

double brute_force_suspension(const ProbGraph& g, const SuspectSet& vi,
                              const RemovalSet& removal) {
    removal.validate(g);
    double states = std::exp2(static_cast<double>(vi.members.size()));
    for (NodeId v = 0; v < g.n; ++v)
        states *= static_cast<double>(g.in_degree(v) + 1);
    if (states > 1e7)
        throw DataError("instance too large for exhaustive enumeration");

    SimContext ctx(g);
    ctx.set_removal(g, removal);

    double total = 0.0;
    // enumerate live-edge choices depth-first with running probability
    std::vector<std::int64_t> pick(g.n, -1);  // -1 = none
    auto eval_seeds = [&](double w_choice) {
        auto n_sus = vi.members.size();
        for (std::uint64_t bits = 0; bits < (1ull << n_sus); ++bits) {
            double w_x = 1.0;
            std::fill(ctx.in_x.begin(), ctx.in_x.end(), 0);
            for (std::size_t i = 0; i < n_sus; ++i) {
                auto [v, p] = vi.members[i];
                if (bits >> i & 1) {
                    ctx.in_x[v] = 1;
                    w_x *= p;
                } else {
                    w_x *= 1.0 - p;
                }
            }
            if (w_x == 0.0) continue;
            std::uint32_t full = count_infected(g, ctx, false);
            std::uint32_t residual = count_infected(g, ctx, true);
            total += w_choice * w_x *
                     static_cast<double>(full - residual);
        }
    };

    std::vector<NodeId> order;  // nodes with at least one in-edge
    for (NodeId v = 0; v < g.n; ++v) {
        ctx.choice[v] = kNoEdge;
        if (g.in_degree(v) > 0) order.push_back(v);
    }

    // depth-first product over (none + each in-edge) per node; zero-weight
    // branches pruned
    auto rec = [&](auto&& self, std::size_t i, double w) -> void {
        if (i == order.size()) {
            eval_seeds(w);
            return;
        }
        NodeId v = order[i];
        double w_none = std::max(0.0, 1.0 - g.total_in_weight(v));
        if (w_none > 0.0) {
            ctx.choice[v] = kNoEdge;
            self(self, i + 1, w * w_none);
        }
        for (std::uint64_t e = g.in_offsets[v]; e < g.in_offsets[v + 1]; ++e) {
            ctx.choice[v] = static_cast<EdgeId>(e);
            self(self, i + 1, w * g.weight[e]);
        }
        ctx.choice[v] = kNoEdge;
    };
    rec(rec, 0, 1.0);
    return total;
}

std::vector<double> pagerank_scores(const ProbGraph& g, double damping,
                                    double tol, int max_iters) {
    auto out_deg = g.out_degrees();
    std::vector<double> pr(g.n, 1.0 / g.n), next(g.n, 0.0);
    for (int it = 0; it < max_iters; ++it) {
        double dangling = 0.0;
        for (NodeId v = 0; v < g.n; ++v)
            if (out_deg[v] == 0) dangling += pr[v];
        double base = (1.0 - damping) / g.n + damping * dangling / g.n;
        std::fill(next.begin(), next.end(), base);
        for (EdgeId e = 0; e < g.m; ++e)
            next[g.edge_dst[e]] += damping * pr[g.in_src[e]] / out_deg[g.in_src[e]];
        double diff = 0.0;
        for (NodeId v = 0; v < g.n; ++v) diff += std::abs(next[v] - pr[v]);
        pr.swap(next);
        if (diff < tol) break;
    }
    return pr;
}

RemovalSet baseline(const ProbGraph& g, const SuspectSet& vi, BaselineKind kind,
                    ItemKind mode, std::uint32_t k, PrgState& s,
                    std::uint32_t infmax_samples) {
    RemovalSet r;
    r.kind = mode;

    if (kind == BaselineKind::Randomized) {
        r.ids = distinct_uniform(s, mode == ItemKind::Edge ? g.m : g.n, k);
        return r;
    }

    std::vector<std::uint32_t> ranked_nodes;
    switch (kind) {
        case BaselineKind::Pagerank: {
            auto pr = pagerank_scores(g);
            ranked_nodes = ranked_by_score(pr);
            break;
        }
        case BaselineKind::MaxDegree: {
            std::vector<double> deg(g.n, 0.0);
            auto out_deg = g.out_degrees();
            for (NodeId v = 0; v < g.n; ++v)
                deg[v] = static_cast<double>(out_deg[v]) + g.in_degree(v);
            ranked_nodes = ranked_by_score(deg);
            break;
        }
        case BaselineKind::InfMaxV:
        case BaselineKind::InfMaxVI: {
            auto sets = rr_node_sets(g, s, infmax_samples);
            CandidateSet cand;
            if (kind == BaselineKind::InfMaxVI) {
                std::vector<std::uint32_t> ids;
                for (const auto& [v, p] : vi.members) ids.push_back(v);
                if (ids.empty()) throw DataError("suspect set is empty");
                cand = CandidateSet::of(ItemKind::Node, std::move(ids));
            } else {
                cand = CandidateSet::all(ItemKind::Node);
            }
            CoverageIndex idx(sets, cand, g);
            auto budget = static_cast<std::uint32_t>(
                std::min<std::size_t>(idx.candidates().size(),
                                      mode == ItemKind::Edge
                                          ? std::max<std::size_t>(k, 64)
                                          : k));
            ranked_nodes = greedy_max_cover(idx, budget).solution;
            break;
        }
        case BaselineKind::Randomized:
            break;  // handled above
    }

    if (mode == ItemKind::Node) {
        if (k > ranked_nodes.size()) throw DataError("k exceeds candidate count");
        r.ids.assign(ranked_nodes.begin(), ranked_nodes.begin() + k);
    } else {
        if (k > g.m) throw DataError("k exceeds edge count");
        // the ranked pool may not carry k incoming edges; pad with the
        // remaining nodes so the round-robin can always fill the budget
        std::vector<std::uint8_t> listed(g.n, 0);
        for (std::uint32_t v : ranked_nodes) listed[v] = 1;
        for (NodeId v = 0; v < g.n; ++v)
            if (!listed[v]) ranked_nodes.push_back(v);
        r.ids = edges_into_nodes(g, ranked_nodes, k);
    }
    return r;
}

SolutionAnalysis analyze_solution(const ProbGraph& g, const SuspectSet& vi,
                                  const RemovalSet& removal) {
    if (removal.kind != ItemKind::Node)
        throw std::invalid_argument("analysis requires a node removal set");
    if (removal.ids.empty())
        throw std::invalid_argument("removal set is empty");
    removal.validate(g);
    SolutionAnalysis a;
    std::size_t in_vi = 0;
    for (std::uint32_t v : removal.ids) {
        if (vi.is_suspect(v)) ++in_vi;
        a.cost += (1.0 - vi.p_of[v]) * std::log(g.in_degree(v) + 1.0);
    }
    a.ssr = static_cast<double>(in_vi) / static_cast<double>(removal.ids.size());
    return a;
}

void write_suspension_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "method,k,suspension\n";
    for (const auto& row : rows)
        out << row.method << ',' << row.k << ',' << row.suspension << '\n';
}

}  // namespace hsaw
