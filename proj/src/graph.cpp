#include "hsaw/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace hsaw {

namespace {

constexpr double kInSumTolerance = 1e-12;

[[noreturn]] void fail(const std::string& msg) { throw DataError(msg); }

struct RawEdge {
    std::uint64_t u, v;
    double w;
    bool has_w;
};

bool parse_line(const std::string& line, RawEdge& out, bool& blank) {
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
        ++i;
    if (i == line.size() || line[i] == '#') {
        blank = true;
        return true;
    }
    blank = false;
    std::istringstream is(line.substr(i));
    std::string a, b, c, rest;
    if (!(is >> a >> b)) return false;
    out.has_w = static_cast<bool>(is >> c);
    if (is >> rest) return false;  // trailing tokens
    try {
        std::size_t pos = 0;
        out.u = std::stoull(a, &pos);
        if (pos != a.size()) return false;
        out.v = std::stoull(b, &pos);
        if (pos != b.size()) return false;
        if (out.has_w) {
            out.w = std::stod(c, &pos);
            if (pos != c.size()) return false;
        } else {
            out.w = 0.0;
        }
    } catch (...) {
        return false;
    }
    return true;
}

double draw_raw_weight(PrgState& s) {
    for (;;) {
        double r = u01(prg_next(s));
        if (r > 0.0) return r;  // raw weights must be positive
    }
}

}  // namespace

void ProbGraph::validate() const {
    if (in_offsets.size() != static_cast<std::size_t>(n) + 1)
        fail("graph: offset array size mismatch");
    if (in_src.size() != m || in_cum.size() != m || weight.size() != m ||
        edge_dst.size() != m)
        fail("graph: edge array size mismatch");
    if (in_offsets[0] != 0 || in_offsets[n] != m)
        fail("graph: offsets do not cover edge range");
    for (NodeId v = 0; v < n; ++v) {
        std::uint64_t lo = in_offsets[v], hi = in_offsets[v + 1];
        if (hi < lo) fail("graph: offsets not monotone");
        double prev_cum = 0.0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            NodeId u = in_src[i];
            if (u >= n) fail("graph: source id out of range");
            if (u == v) fail("graph: self-loop on node " + std::to_string(v));
            if (i > lo && in_src[i] <= in_src[i - 1])
                fail("graph: in-adjacency not sorted / duplicate edge into " +
                     std::to_string(v));
            if (edge_dst[i] != v) fail("graph: edge_dst mismatch");
            double w = weight[i];
            if (!(w > 0.0) || w > 1.0)
                fail("graph: weight out of (0,1] on edge " + std::to_string(i));
            if (!(in_cum[i] > prev_cum))
                fail("graph: cumulative weights not increasing at node " +
                     std::to_string(v));
            if (std::abs(in_cum[i] - (prev_cum + w)) > 1e-9)
                fail("graph: cumulative array inconsistent with weights");
            prev_cum = in_cum[i];
        }
        if (hi > lo && in_cum[hi - 1] > 1.0 + kInSumTolerance)
            fail("graph: in-weight sum " + std::to_string(in_cum[hi - 1]) +
                 " > 1 at node " + std::to_string(v));
    }
}

std::vector<std::uint32_t> ProbGraph::out_degrees() const {
    std::vector<std::uint32_t> deg(n, 0);
    for (EdgeId e = 0; e < m; ++e) deg[in_src[e]]++;
    return deg;
}

ProbGraph build_graph(NodeId n,
                      std::vector<std::tuple<NodeId, NodeId, double>> edges,
                      WeightMode mode, std::uint64_t seed) {
    for (auto& [u, v, w] : edges) {
        if (u >= n || v >= n) fail("edge endpoint out of range");
        if (u == v)
            fail("self-loop " + std::to_string(u) + " -> " + std::to_string(v));
        if (mode == WeightMode::Given && (!(w > 0.0) || w > 1.0))
            fail("weight " + std::to_string(w) + " out of (0,1] on edge " +
                 std::to_string(u) + " -> " + std::to_string(v));
    }
    // canonical order: by target, then source (edge id = CSR position)
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<1>(a), std::get<0>(a)) <
               std::tie(std::get<1>(b), std::get<0>(b));
    });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (std::get<0>(edges[i]) == std::get<0>(edges[i - 1]) &&
            std::get<1>(edges[i]) == std::get<1>(edges[i - 1]))
            fail("duplicate edge " + std::to_string(std::get<0>(edges[i])) +
                 " -> " + std::to_string(std::get<1>(edges[i])));
    }

    ProbGraph g;
    g.n = n;
    g.m = static_cast<EdgeId>(edges.size());
    g.in_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    g.in_src.resize(g.m);
    g.in_cum.resize(g.m);
    g.weight.resize(g.m);
    g.edge_dst.resize(g.m);

    for (const auto& e : edges) g.in_offsets[std::get<1>(e) + 1]++;
    for (NodeId v = 0; v < n; ++v) g.in_offsets[v + 1] += g.in_offsets[v];

    PrgState prg = seed_from_worker(seed);
    for (EdgeId i = 0; i < g.m; ++i) {
        g.in_src[i] = std::get<0>(edges[i]);
        g.edge_dst[i] = std::get<1>(edges[i]);
    }
    for (NodeId v = 0; v < n; ++v) {
        std::uint64_t lo = g.in_offsets[v], hi = g.in_offsets[v + 1];
        std::uint64_t d = hi - lo;
        if (d == 0) continue;
        switch (mode) {
            case WeightMode::Given: {
                double cum = 0.0;
                for (std::uint64_t i = lo; i < hi; ++i) {
                    g.weight[i] = std::get<2>(edges[i]);
                    cum += g.weight[i];
                    g.in_cum[i] = cum;
                }
                if (cum > 1.0 + kInSumTolerance)
                    fail("in-weight sum " + std::to_string(cum) +
                         " > 1 at node " + std::to_string(v));
                break;
            }
            case WeightMode::InDegree: {
                // cumulative arrays always come from sequential summation so
                // a save/load round-trip reproduces them bit-exactly
                double w = 1.0 / static_cast<double>(d);
                double cum = 0.0;
                for (std::uint64_t i = lo; i < hi; ++i) {
                    g.weight[i] = w;
                    cum += w;
                    g.in_cum[i] = cum;
                }
                break;
            }
            case WeightMode::RandomNormalized: {
                double sum = 0.0;
                for (std::uint64_t i = lo; i < hi; ++i) {
                    g.weight[i] = draw_raw_weight(prg);
                    sum += g.weight[i];
                }
                double cum = 0.0;
                for (std::uint64_t i = lo; i < hi; ++i) {
                    g.weight[i] /= sum;
                    cum += g.weight[i];
                    g.in_cum[i] = cum;
                }
                break;
            }
        }
    }
    g.validate();
    return g;
}

ProbGraph load_edge_list(const std::string& path, WeightMode mode,
                         std::uint64_t seed, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) fail("cannot open edge list: " + path);

    std::vector<RawEdge> raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        RawEdge e;
        bool blank = false;
        if (!parse_line(line, e, blank))
            fail(path + ":" + std::to_string(lineno) + ": malformed line");
        if (blank) continue;
        if (mode == WeightMode::Given && !e.has_w)
            fail(path + ":" + std::to_string(lineno) +
                 ": weight required in given-weight mode");
        raw.push_back(e);
    }

    // remap arbitrary ids to dense 0..n-1, ascending by raw id
    std::vector<std::uint64_t> ids;
    ids.reserve(raw.size() * 2);
    for (const auto& e : raw) {
        ids.push_back(e.u);
        ids.push_back(e.v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) fail(path + ": no edges");
    std::unordered_map<std::uint64_t, NodeId> dense;
    dense.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        dense[ids[i]] = static_cast<NodeId>(i);
    bool identity = ids.back() == ids.size() - 1;

    std::vector<std::tuple<NodeId, NodeId, double>> edges;
    edges.reserve(raw.size() * (opts.symmetrize ? 2 : 1));
    for (const auto& e : raw)
        edges.emplace_back(dense[e.u], dense[e.v], e.w);
    if (opts.symmetrize) {
        std::size_t orig = edges.size();
        for (std::size_t i = 0; i < orig; ++i) {
            auto [u, v, w] = edges[i];
            edges.emplace_back(v, u, w);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }

    if (!identity || !opts.mapping_out.empty()) {
        std::string mpath =
            opts.mapping_out.empty() ? path + ".nodemap" : opts.mapping_out;
        std::ofstream mf(mpath);
        if (!mf) fail("cannot write node map: " + mpath);
        for (std::size_t i = 0; i < ids.size(); ++i)
            mf << ids[i] << ' ' << i << '\n';
    }

    return build_graph(static_cast<NodeId>(ids.size()), std::move(edges), mode,
                       seed);
}

SuspectSet SuspectSet::from_members(
    std::vector<std::pair<NodeId, double>> mem, const ProbGraph& g) {
    std::sort(mem.begin(), mem.end());
    SuspectSet vi;
    vi.p_of.assign(g.n, 0.0);
    for (std::size_t i = 0; i < mem.size(); ++i) {
        auto [v, p] = mem[i];
        if (v >= g.n) fail("suspect node " + std::to_string(v) + " unknown");
        if (!(p > 0.0) || p > 1.0)
            fail("suspect probability " + std::to_string(p) + " out of (0,1]");
        if (i > 0 && mem[i - 1].first == v)
            fail("duplicate suspect node " + std::to_string(v));
        vi.p_of[v] = p;
    }
    vi.members = std::move(mem);
    return vi;
}

SuspectSet load_suspects(const std::string& path, const ProbGraph& g) {
    std::ifstream in(path);
    if (!in) fail("cannot open suspect file: " + path);
    std::vector<std::pair<NodeId, double>> mem;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t i = 0;
        while (i < line.size() &&
               std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        if (i == line.size() || line[i] == '#') continue;
        std::istringstream is(line);
        std::uint64_t v;
        double p;
        std::string rest;
        if (!(is >> v >> p) || (is >> rest))
            fail(path + ":" + std::to_string(lineno) + ": malformed line");
        if (v >= g.n)
            fail(path + ":" + std::to_string(lineno) + ": unknown node id " +
                 std::to_string(v));
        mem.emplace_back(static_cast<NodeId>(v), p);
    }
    return SuspectSet::from_members(std::move(mem), g);
}

SuspectSet random_suspects(const ProbGraph& g, NodeId count,
                           std::uint64_t seed) {
    if (count > g.n)
        fail("suspect count " + std::to_string(count) + " exceeds node count");
    PrgState s = seed_from_worker(seed);
    std::unordered_set<NodeId> chosen;
    chosen.reserve(count * 2);
    while (chosen.size() < count) chosen.insert(pick_uniform_node(s, g.n));
    std::vector<std::pair<NodeId, double>> mem;
    mem.reserve(count);
    for (NodeId v : chosen) mem.emplace_back(v, 0.0);
    std::sort(mem.begin(), mem.end());
    for (auto& [v, p] : mem) {
        do {
            p = u01(prg_next(s));
        } while (p == 0.0);
    }
    return SuspectSet::from_members(std::move(mem), g);
}

ProbGraph synth_graph(NodeId n, std::uint32_t density, std::uint64_t seed) {
    if (n < 2) fail("synthetic graph needs at least 2 nodes");
    if (density < 1) fail("density must be at least 1");
    std::uint64_t want = static_cast<std::uint64_t>(n) * density;
    std::uint64_t possible = static_cast<std::uint64_t>(n) * (n - 1);
    if (want > possible)
        fail("density " + std::to_string(density) + " exceeds complete digraph");

    PrgState s = seed_from_worker(seed);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(want * 2);
    std::vector<std::tuple<NodeId, NodeId, double>> edges;
    edges.reserve(want);
    while (edges.size() < want) {
        NodeId u = pick_uniform_node(s, n);
        NodeId v = pick_uniform_node(s, n);
        if (u == v) continue;
        std::uint64_t key = static_cast<std::uint64_t>(u) * n + v;
        if (!seen.insert(key).second) continue;
        edges.emplace_back(u, v, 0.0);
    }
    return build_graph(n, std::move(edges), WeightMode::InDegree, seed);
}

void save_edge_list(const ProbGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write edge list: " + path);
    char buf[64];
    for (EdgeId e = 0; e < g.m; ++e) {
        std::snprintf(buf, sizeof buf, "%u %u %.17g", g.in_src[e],
                      g.edge_dst[e], g.weight[e]);
        out << buf << '\n';
    }
}

namespace {
constexpr char kCacheMagic[5] = {'H', 'S', 'A', 'W', '1'};

void put_u64(std::ofstream& f, std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::ifstream& f) {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return x;
}
}  // namespace

void save_cache(const ProbGraph& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail("cannot write cache: " + path);
    f.write(kCacheMagic, 5);
    put_u64(f, g.n);
    put_u64(f, g.m);
    for (std::uint64_t x : g.in_offsets) put_u64(f, x);
    for (NodeId x : g.in_src) put_u64(f, x);
    for (double w : g.weight) {
        std::uint64_t bits;
        std::memcpy(&bits, &w, 8);
        put_u64(f, bits);
    }
}

ProbGraph load_cache(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail("cannot open cache: " + path);
    char magic[5];
    f.read(magic, 5);
    if (!f || std::memcmp(magic, kCacheMagic, 5) != 0)
        fail("bad cache magic in " + path);
    ProbGraph g;
    g.n = static_cast<NodeId>(get_u64(f));
    g.m = static_cast<EdgeId>(get_u64(f));
    g.in_offsets.resize(static_cast<std::size_t>(g.n) + 1);
    for (auto& x : g.in_offsets) x = get_u64(f);
    g.in_src.resize(g.m);
    for (auto& x : g.in_src) x = static_cast<NodeId>(get_u64(f));
    g.weight.resize(g.m);
    for (auto& w : g.weight) {
        std::uint64_t bits = get_u64(f);
        std::memcpy(&w, &bits, 8);
    }
    if (!f) fail("truncated cache: " + path);
    g.in_cum.resize(g.m);
    g.edge_dst.resize(g.m);
    for (NodeId v = 0; v < g.n; ++v) {
        double cum = 0.0;
        for (std::uint64_t i = g.in_offsets[v]; i < g.in_offsets[v + 1]; ++i) {
            cum += g.weight[i];
            g.in_cum[i] = cum;
            g.edge_dst[i] = v;
        }
    }
    g.validate();
    return g;
}

void CandidateSet::validate(const ProbGraph& g) const {
    if (size(g) == 0) fail("candidate set is empty");
    if (!ids) return;
    std::uint32_t limit = kind == ItemKind::Edge ? g.m : g.n;
    std::unordered_set<std::uint32_t> seen;
    for (std::uint32_t id : *ids) {
        if (id >= limit)
            fail("candidate id " + std::to_string(id) + " out of range");
        if (!seen.insert(id).second)
            fail("duplicate candidate id " + std::to_string(id));
    }
}

}  // namespace hsaw
