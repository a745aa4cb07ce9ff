#include "hsaw/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <thread>

namespace hsaw {

namespace {

// One attempt's draw cursor. The draw budget is fixed per event so that the
// same state snapshot replays the same walk: one draw for the start node,
// one per edge selection, and one acceptance draw per suspect encounter
// (including the start node).
struct WalkCursor {
    PrgState s;
    NodeId node = kInvalidNode;
    std::uint32_t edges = 0;

    bool start(const ProbGraph& g, const SuspectSet& vi,
               std::span<const NodeId> domain) {
        if (domain.empty()) {
            node = pick_uniform_node(s, g.n);
        } else {
            double r = u01(prg_next(s));
            auto idx = static_cast<std::size_t>(
                r * static_cast<double>(domain.size()));
            if (idx >= domain.size()) idx = domain.size() - 1;
            node = domain[idx];
        }
        if (vi.is_suspect(node)) {
            double r = u01(prg_next(s));
            if (r <= vi.p_of[node]) return true;  // length-0 hit
        }
        return false;
    }

    enum class EdgeEv { Stepped, NoEdge, LenCap };

    EdgeEv advance_edge(const ProbGraph& g, NodeId& out_u, EdgeId& out_e,
                        std::uint64_t len_cap) {
        if (edges >= len_cap) return EdgeEv::LenCap;
        auto pick = pick_live_in_edge(s, g, node);
        if (!pick) return EdgeEv::NoEdge;
        out_u = pick->src;
        out_e = pick->edge;
        return EdgeEv::Stepped;
    }

    // Acceptance draw if u is a suspect; true terminates the walk with
    // len = edges. Otherwise the cursor moves to u.
    bool resolve(const SuspectSet& vi, NodeId u) {
        ++edges;
        if (vi.is_suspect(u)) {
            double r = u01(prg_next(s));
            if (r <= vi.p_of[u]) return true;
        }
        node = u;
        return false;
    }
};

// Exact membership window over the last `w` visited nodes (ring buffer).
struct WindowFilter {
    NodeId ring[8];
    std::uint32_t size = 0;
    std::uint32_t pos = 0;

    void reset(std::uint32_t w, NodeId v0) {
        size = w > 8 ? 8 : w;
        for (std::uint32_t i = 0; i < size; ++i) ring[i] = kInvalidNode;
        pos = 0;
        push(v0);
    }
    bool contains(NodeId u) const {
        for (std::uint32_t i = 0; i < size; ++i)
            if (ring[i] == u) return true;
        return false;
    }
    void push(NodeId u) {
        if (size == 0) return;
        ring[pos] = u;
        pos = (pos + 1) % size;
    }
};

// Brent: keep the node at the last power-of-two position and compare each
// subsequent node against it.
struct BrentState {
    NodeId anchor = kInvalidNode;
    std::uint32_t power = 1;
    std::uint32_t lam = 0;

    void reset(NodeId v0) {
        anchor = v0;
        power = 1;
        lam = 0;
    }
    bool check(NodeId u) {
        if (u == anchor) return true;
        if (++lam == power) {
            anchor = u;
            power <<= 1;
            lam = 0;
        }
        return false;
    }
};

// Floyd: a second cursor replays the identical draw stream at half speed;
// comparing positions (i, 2i).
struct FloydState {
    WalkCursor tortoise;
    std::uint64_t hare_pos = 0;

    void reset(const ProbGraph& g, const SuspectSet& vi, PrgState seed,
               std::span<const NodeId> domain) {
        tortoise = WalkCursor{seed};
        bool hit = tortoise.start(g, vi, domain);
        (void)hit;  // the hare start cannot both hit and keep walking
        hare_pos = 0;
    }
    bool check(const ProbGraph& g, const SuspectSet& vi, NodeId hare_u,
               std::uint64_t len_cap) {
        ++hare_pos;
        if (hare_pos % 2 != 0) return false;
        NodeId u = kInvalidNode;
        EdgeId e = 0;
        auto ev = tortoise.advance_edge(g, u, e, len_cap);
        assert(ev == WalkCursor::EdgeEv::Stepped);
        (void)ev;
        bool hit = tortoise.resolve(vi, u);
        assert(!hit);  // the hare continued past this position
        (void)hit;
        return tortoise.node == hare_u;
    }
};

struct AttemptResult {
    bool accepted = false;
    bool cycle_flagged = false;
    bool crossed = false;
    std::uint32_t len = 0;
};

AttemptResult run_walk_attempt(const ProbGraph& g, const SuspectSet& vi,
                               PrgState& s, CycleHeuristic heur,
                               std::uint32_t window,
                               std::span<const NodeId> start_domain,
                               const std::uint8_t* allowed,
                               std::vector<NodeId>* record,
                               std::uint64_t len_cap) {
    AttemptResult res;
    PrgState snapshot = s;
    WalkCursor hare{s};
    bool start_hit = hare.start(g, vi, start_domain);
    if (record) record->push_back(hare.node);
    if (start_hit) {
        res.accepted = true;
        res.len = 0;
        s = hare.s;
        return res;
    }

    WindowFilter win;
    win.reset(window, hare.node);
    BrentState brent;
    brent.reset(hare.node);
    FloydState floyd;
    if (heur == CycleHeuristic::Floyd)
        floyd.reset(g, vi, snapshot, start_domain);

    for (;;) {
        NodeId u = kInvalidNode;
        EdgeId e = 0;
        auto ev = hare.advance_edge(g, u, e, len_cap);
        if (ev != WalkCursor::EdgeEv::Stepped) break;  // no edge or length cap

        bool cyc = win.contains(u);
        if (!cyc && heur == CycleHeuristic::Brent) cyc = brent.check(u);
        if (!cyc && heur == CycleHeuristic::Floyd)
            cyc = floyd.check(g, vi, u, len_cap);
        if (cyc) {
            res.cycle_flagged = true;
            break;
        }

        bool hit = hare.resolve(vi, u);
        if (record) record->push_back(u);
        if (hit) {
            res.accepted = true;
            res.len = hare.edges;
            break;
        }
        if (allowed && !allowed[u]) {
            res.crossed = true;  // continuing needs u's adjacency
            break;
        }
        win.push(u);
    }
    s = hare.s;
    return res;
}

// Exact-visited-set attempt; mark is an epoch array of size n.
AttemptResult run_exact_attempt(const ProbGraph& g, const SuspectSet& vi,
                                PrgState& s, std::vector<std::uint32_t>& mark,
                                std::uint32_t epoch, HsawSample* out) {
    AttemptResult res;
    WalkCursor c{s};
    bool start_hit = c.start(g, vi, {});
    if (out) {
        out->nodes.clear();
        out->edge_ids.clear();
        out->nodes.push_back(c.node);
    }
    if (start_hit) {
        res.accepted = true;
        s = c.s;
        return res;
    }
    mark[c.node] = epoch;
    for (;;) {
        NodeId u = kInvalidNode;
        EdgeId e = 0;
        auto ev = c.advance_edge(g, u, e, g.n);
        if (ev != WalkCursor::EdgeEv::Stepped) break;
        if (mark[u] == epoch) {
            res.cycle_flagged = true;
            break;
        }
        bool hit = c.resolve(vi, u);
        if (out) {
            out->nodes.push_back(u);
            out->edge_ids.push_back(e);
        }
        if (hit) {
            res.accepted = true;
            res.len = c.edges;
            break;
        }
        mark[u] = epoch;
    }
    s = c.s;
    return res;
}

}  // namespace

NaiveSampleResult sample_hsaw_naive(const ProbGraph& g, const SuspectSet& vi,
                                    PrgState& s, std::uint64_t max_attempts) {
    std::vector<std::uint32_t> mark(g.n, 0);
    HsawSample sample;
    for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        auto epoch = static_cast<std::uint32_t>(attempt);
        if (epoch == 0) {
            std::fill(mark.begin(), mark.end(), 0);
            epoch = 1;
        }
        auto res = run_exact_attempt(g, vi, s, mark, epoch, &sample);
        if (res.accepted) return {std::move(sample), attempt};
    }
    throw SamplingError("attempt budget exhausted without hitting a suspect");
}

std::vector<EncodedWalk> thread_sample(const ProbGraph& g,
                                       const SuspectSet& vi,
                                       std::uint64_t worker_id, std::uint32_t l,
                                       const SamplerConfig& cfg,
                                       const WalkObserver* observer) {
    PrgState s = seed_from_worker(worker_id);
    for (int i = 0; i < 8; ++i) prg_next(s);  // burn-in
    std::vector<EncodedWalk> out;
    std::vector<NodeId> record;
    for (std::uint32_t i = 0; i < l; ++i) {
        PrgState snapshot = s;
        record.clear();
        auto res = run_walk_attempt(g, vi, s, cfg.heuristic, cfg.window, {},
                                    nullptr, observer ? &record : nullptr,
                                    g.n);
        if (res.accepted) {
            EncodedWalk ew{snapshot, res.len, worker_id,
                           static_cast<std::uint32_t>(out.size())};
            out.push_back(ew);
            if (observer) (*observer)(ew, record);
        }
    }
    return out;
}

DecodeContext::DecodeContext(const ProbGraph& g, const SuspectSet& vi)
    : g_(g), vi_(vi), mark_(g.n, 0) {}

std::optional<HsawSample> DecodeContext::decode(const EncodedWalk& ew) {
    return decode_restricted(ew, {});
}

std::optional<HsawSample> DecodeContext::decode_restricted(
    const EncodedWalk& ew, std::span<const NodeId> start_domain) {
    if (++epoch_ == 0) {
        std::fill(mark_.begin(), mark_.end(), 0);
        epoch_ = 1;
    }
    PrgState s = ew.seed;
    if (s.state == 0) throw DataError("decode: zero seed state");
    WalkCursor c{s};
    bool start_hit = c.start(g_, vi_, start_domain);
    HsawSample sample;
    sample.nodes.push_back(c.node);
    if (start_hit) {
        if (ew.len != 0)
            throw DataError("decode: replay hit at start but len > 0");
        return sample;
    }
    if (ew.len == 0)
        throw DataError("decode: len 0 but start was not accepted");
    mark_[c.node] = epoch_;
    for (;;) {
        NodeId u = kInvalidNode;
        EdgeId e = 0;
        auto ev = c.advance_edge(g_, u, e, g_.n);
        if (ev != WalkCursor::EdgeEv::Stepped)
            throw DataError("decode: replay terminated before encoded length");
        if (mark_[u] == epoch_) return std::nullopt;  // missed cycle
        bool hit = c.resolve(vi_, u);
        sample.nodes.push_back(u);
        sample.edge_ids.push_back(e);
        if (hit) {
            if (c.edges != ew.len)
                throw DataError("decode: replay accepted at wrong length");
            return sample;
        }
        if (c.edges >= ew.len)
            throw DataError("decode: replay overran encoded length");
        mark_[u] = epoch_;
    }
}

std::optional<HsawSample> decode_walk(const ProbGraph& g, const SuspectSet& vi,
                                      const EncodedWalk& ew) {
    DecodeContext ctx(g, vi);
    return ctx.decode(ew);
}

AttemptVerdict run_attempt_with(const ProbGraph& g, const SuspectSet& vi,
                                PrgState& s, CycleHeuristic heuristic,
                                std::uint32_t window) {
    auto res = run_walk_attempt(g, vi, s, heuristic, window, {}, nullptr,
                                nullptr, g.n);
    return {res.accepted, res.cycle_flagged};
}

AttemptVerdict run_attempt_exact(const ProbGraph& g, const SuspectSet& vi,
                                 PrgState& s) {
    std::vector<std::uint32_t> mark(g.n, 0);
    auto res = run_exact_attempt(g, vi, s, mark, 1, nullptr);
    return {res.accepted, res.cycle_flagged};
}

// The standalone detectors extend the walk well past the generation cap so a
// repeat entered before any terminating event is actually reachable: Floyd
// compares positions (i, 2i) and needs up to 2n steps, Brent up to about 3n.
bool detect_cycle_floyd(const ProbGraph& g, const SuspectSet& vi,
                        PrgState seed) {
    return run_walk_attempt(g, vi, seed, CycleHeuristic::Floyd, 0, {}, nullptr,
                            nullptr, 4ull * g.n + 16)
        .cycle_flagged;
}

bool detect_cycle_brent(const ProbGraph& g, const SuspectSet& vi,
                        PrgState seed) {
    return run_walk_attempt(g, vi, seed, CycleHeuristic::Brent, 0, {}, nullptr,
                            nullptr, 4ull * g.n + 16)
        .cycle_flagged;
}

bool detect_cycle_exact(const ProbGraph& g, const SuspectSet& vi,
                        PrgState seed) {
    return run_attempt_exact(g, vi, seed).cycle_flagged;
}

SampleStream::SampleStream(const ProbGraph& g, const SuspectSet& vi,
                           std::uint64_t seed, std::uint32_t workers,
                           SamplerConfig cfg)
    : g_(g), vi_(vi), seed_(seed), workers_(workers ? workers : 1), cfg_(cfg) {}

void SampleStream::ensure(std::uint64_t min_accepted) {
    struct BatchOut {
        std::vector<HsawSample> samples;
        std::vector<std::uint32_t> seqs;
    };

    std::uint64_t grow = std::max<std::uint64_t>(workers_ * 4, 64);
    while (samples_.size() < min_accepted) {
        std::uint64_t attempts_so_far = next_batch_ * cfg_.batch_size;
        std::uint64_t budget_left = cfg_.max_attempts > attempts_so_far
                                        ? cfg_.max_attempts - attempts_so_far
                                        : 0;
        std::uint64_t max_batches = budget_left / cfg_.batch_size;
        if (max_batches == 0)
            throw SamplingError(
                "attempt budget exhausted while sampling walks; suspects may "
                "be unreachable");

        // round size from the observed acceptance rate; only a speed knob,
        // since pools are cut at whole-batch prefixes by accepted count
        std::uint64_t need = min_accepted - samples_.size();
        std::uint64_t batches;
        if (samples_.empty()) {
            batches = grow;
            grow = std::min<std::uint64_t>(grow * 4, 1u << 20);
        } else {
            double rate = static_cast<double>(samples_.size()) /
                          static_cast<double>(attempts_so_far);
            double est = static_cast<double>(need) /
                         (rate * static_cast<double>(cfg_.batch_size));
            batches = static_cast<std::uint64_t>(est * 1.1) + 1;
        }
        batches = std::min(batches, max_batches);
        batches = std::max<std::uint64_t>(batches, 1);

        std::vector<BatchOut> results(batches);
        std::atomic<std::uint64_t> cursor{0};
        auto work = [&]() {
            DecodeContext dc(g_, vi_);
            for (;;) {
                std::uint64_t k = cursor.fetch_add(1);
                if (k >= batches) return;
                std::uint64_t wid = seed_ + next_batch_ + k;
                auto encoded =
                    thread_sample(g_, vi_, wid, cfg_.batch_size, cfg_);
                auto& out = results[k];
                for (const auto& ew : encoded) {
                    if (auto s = dc.decode(ew)) {
                        out.samples.push_back(std::move(*s));
                        out.seqs.push_back(ew.seq);
                    }
                }
            }
        };
        if (workers_ == 1) {
            work();
        } else {
            std::vector<std::thread> threads;
            threads.reserve(workers_);
            for (std::uint32_t t = 0; t < workers_; ++t)
                threads.emplace_back(work);
            for (auto& t : threads) t.join();
        }

        for (std::uint64_t k = 0; k < batches; ++k) {
            std::uint64_t wid = seed_ + next_batch_ + k;
            auto& out = results[k];
            for (std::size_t i = 0; i < out.samples.size(); ++i) {
                samples_.push_back(std::move(out.samples[i]));
                tags_.push_back({wid, out.seqs[i]});
            }
            accepted_after_batch_.push_back(samples_.size());
        }
        next_batch_ += batches;
    }
}

std::span<const HsawSample> SampleStream::prefix(std::uint64_t offset,
                                                 std::uint64_t count) const {
    if (offset + count > samples_.size())
        throw std::out_of_range("sample stream prefix not materialized");
    return {samples_.data() + offset, samples_.data() + offset + count};
}

SampleStream::Counters SampleStream::counters_for(
    std::uint64_t min_accepted) const {
    if (min_accepted == 0) return {0, 0};
    auto it = std::lower_bound(accepted_after_batch_.begin(),
                               accepted_after_batch_.end(), min_accepted);
    if (it == accepted_after_batch_.end())
        throw std::out_of_range("sample stream target not materialized");
    std::uint64_t batches =
        static_cast<std::uint64_t>(it - accepted_after_batch_.begin()) + 1;
    return {batches * cfg_.batch_size, *it};
}

SamplePool SampleStream::to_pool(std::uint64_t min_accepted) const {
    Counters c = counters_for(min_accepted);
    SamplePool pool;
    pool.samples.assign(samples_.begin(),
                        samples_.begin() + static_cast<std::ptrdiff_t>(c.accepted));
    pool.tags.assign(tags_.begin(),
                     tags_.begin() + static_cast<std::ptrdiff_t>(c.accepted));
    pool.attempts = c.attempts;
    return pool;
}

SamplePool stream_samples(const ProbGraph& g, const SuspectSet& vi,
                          std::uint32_t workers, std::uint64_t target,
                          std::uint64_t seed, const SamplerConfig& cfg) {
    SampleStream stream(g, vi, seed, workers, cfg);
    stream.ensure(target);
    return stream.to_pool(target);
}

double estimate_influence(const SamplePool& pool, NodeId n) {
    if (pool.attempts == 0)
        throw std::invalid_argument("estimate_influence: no attempts");
    return static_cast<double>(n) * static_cast<double>(pool.accepted()) /
           static_cast<double>(pool.attempts);
}

namespace detail {

RestrictedBatch sample_batch_restricted(const ProbGraph& g,
                                        const SuspectSet& vi,
                                        std::uint64_t worker_id,
                                        std::uint32_t l,
                                        const SamplerConfig& cfg,
                                        std::span<const NodeId> start_domain,
                                        const std::uint8_t* allowed,
                                        DecodeContext& dc) {
    RestrictedBatch out;
    PrgState s = seed_from_worker(worker_id);
    for (int i = 0; i < 8; ++i) prg_next(s);
    std::uint32_t emitted = 0;
    for (std::uint32_t i = 0; i < l; ++i) {
        PrgState snapshot = s;
        auto res = run_walk_attempt(g, vi, s, cfg.heuristic, cfg.window,
                                    start_domain, allowed, nullptr, g.n);
        if (res.crossed) ++out.crossings;
        if (!res.accepted) continue;
        EncodedWalk ew{snapshot, res.len, worker_id, emitted++};
        if (auto sample = dc.decode_restricted(ew, start_domain)) {
            out.samples.push_back(std::move(*sample));
            out.seqs.push_back(ew.seq);
        }
    }
    return out;
}

}  // namespace detail

void dump_walks(const SamplePool& pool, std::ostream& out) {
    for (std::size_t i = 0; i < pool.samples.size(); ++i) {
        const auto& s = pool.samples[i];
        const auto& t = pool.tags[i];
        out << t.worker_id << ' ' << t.seq << ' ' << s.edge_ids.size();
        for (NodeId v : s.nodes) out << ' ' << v;
        out << '\n';
    }
}

}  // namespace hsaw
