#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsaw/prng.hpp"
#include "hsaw/types.hpp"

namespace hsaw {

// Directed probabilistic graph in compressed in-adjacency form. Edge ids are
// positions in the CSR arrays: in-edges grouped by target node, sorted by
// source id within each group. That fixed order is what makes encoded-walk
// replay deterministic.
struct ProbGraph {
    NodeId n = 0;
    EdgeId m = 0;
    std::vector<std::uint64_t> in_offsets;  // n + 1
    std::vector<NodeId> in_src;             // m, sorted ascending per target
    std::vector<double> in_cum;             // m, per-node cumulative weights
    std::vector<double> weight;             // m, individual edge weights
    std::vector<NodeId> edge_dst;           // m, target node of each edge id

    std::pair<NodeId, NodeId> endpoints(EdgeId e) const {
        return {in_src[e], edge_dst[e]};
    }

    std::uint32_t in_degree(NodeId v) const {
        return static_cast<std::uint32_t>(in_offsets[v + 1] - in_offsets[v]);
    }

    double total_in_weight(NodeId v) const {
        return in_offsets[v + 1] > in_offsets[v] ? in_cum[in_offsets[v + 1] - 1]
                                                 : 0.0;
    }

    std::span<const NodeId> in_sources(NodeId v) const {
        return {in_src.data() + in_offsets[v],
                in_src.data() + in_offsets[v + 1]};
    }

    // Throws DataError if any invariant is violated (in-sum, ordering,
    // duplicate edges, self-loops, weight range).
    void validate() const;

    std::vector<std::uint32_t> out_degrees() const;
};

struct EdgePick {
    NodeId src;
    EdgeId edge;
};

// Live-edge draw for node v: exactly one PRG draw regardless of outcome.
// Returns the in-edge whose cumulative weight bracket contains the draw, or
// nothing with probability 1 - sum of in-weights.
inline std::optional<EdgePick> pick_live_in_edge(PrgState& s,
                                                 const ProbGraph& g, NodeId v) {
    double r = u01(prg_next(s));
    std::uint64_t lo = g.in_offsets[v];
    std::uint64_t hi = g.in_offsets[v + 1];
    if (lo == hi || r >= g.in_cum[hi - 1]) return std::nullopt;
    if (hi - lo <= 16) {  // short rows: one sequential cache-friendly scan
        while (g.in_cum[lo] <= r) ++lo;
        return EdgePick{g.in_src[lo], static_cast<EdgeId>(lo)};
    }
    // first cumulative entry > r
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (g.in_cum[mid] > r)
            hi = mid;
        else
            lo = mid + 1;
    }
    return EdgePick{g.in_src[lo], static_cast<EdgeId>(lo)};
}

// Probabilistic source set: members sorted by node id, plus a dense p lookup
// (0 means not a suspect; member probabilities are in (0, 1]).
struct SuspectSet {
    std::vector<std::pair<NodeId, double>> members;
    std::vector<double> p_of;  // size n

    double p(NodeId v) const { return p_of[v]; }
    bool is_suspect(NodeId v) const { return p_of[v] > 0.0; }
    std::size_t size() const { return members.size(); }

    static SuspectSet from_members(std::vector<std::pair<NodeId, double>> mem,
                                   const ProbGraph& g);
};

// Removal candidates: an explicit id set or everything of the given kind.
struct CandidateSet {
    ItemKind kind = ItemKind::Edge;
    std::optional<std::vector<std::uint32_t>> ids;  // nullopt = All

    static CandidateSet all(ItemKind k) { return CandidateSet{k, std::nullopt}; }
    static CandidateSet of(ItemKind k, std::vector<std::uint32_t> v) {
        return CandidateSet{k, std::move(v)};
    }

    std::size_t size(const ProbGraph& g) const {
        return ids ? ids->size() : (kind == ItemKind::Edge ? g.m : g.n);
    }
    void validate(const ProbGraph& g) const;
};

enum class WeightMode { Given, InDegree, RandomNormalized };

struct LoadOptions {
    bool symmetrize = false;
    // Where to write the raw-id -> dense-id map when input ids are remapped.
    // Empty: "<path>.nodemap" is used (only written if a remap happened).
    std::string mapping_out;
};

// Core builder shared by the loaders: edges as (u, v, w) with dense ids.
// In Given mode w is used as-is; other modes ignore it.
ProbGraph build_graph(NodeId n,
                      std::vector<std::tuple<NodeId, NodeId, double>> edges,
                      WeightMode mode, std::uint64_t seed);

ProbGraph load_edge_list(const std::string& path, WeightMode mode,
                         std::uint64_t seed, const LoadOptions& opts = {});

SuspectSet load_suspects(const std::string& path, const ProbGraph& g);

SuspectSet random_suspects(const ProbGraph& g, NodeId count,
                           std::uint64_t seed);

ProbGraph synth_graph(NodeId n, std::uint32_t density, std::uint64_t seed);

void save_edge_list(const ProbGraph& g, const std::string& path);

// Binary cache: magic "HSAW1", little-endian u64 n, m, then the CSR arrays.
void save_cache(const ProbGraph& g, const std::string& path);
ProbGraph load_cache(const std::string& path);

}  // namespace hsaw
