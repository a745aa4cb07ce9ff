#include "hsaw/partition.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace hsaw {

namespace {

constexpr std::uint64_t kPartStride = 1ull << 40;  // worker-id window per part

void rebuild_base(const ProbGraph& g, Partitioning& part) {
    part.base.assign(part.p, {});
    for (NodeId v = 0; v < g.n; ++v) part.base[part.assign[v]].push_back(v);
}

}  // namespace

std::size_t Partitioning::extended_size(std::uint32_t part) const {
    const auto& mask = extended[part];
    return static_cast<std::size_t>(
        std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

Partitioning partition_graph(const ProbGraph& g, std::uint32_t p,
                             PartitionMethod method, std::uint64_t seed,
                             const std::string& part_file) {
    if (p < 1 || p > g.n)
        throw DataError("part count must be in [1, n]");
    Partitioning part;
    part.p = p;
    part.assign.resize(g.n);

    switch (method) {
        case PartitionMethod::Hash:
            for (NodeId v = 0; v < g.n; ++v) part.assign[v] = v % p;
            break;
        case PartitionMethod::LabelProp: {
            // 10 rounds of synchronous propagation over the undirected view,
            // seeded by a hash of (seed, node); ties go to the smaller label.
            // Plain propagation collapses connected graphs onto one label, so
            // labels carry a capacity of ~1.15 n/p: a node whose plurality
            // label is full falls through to its next choice.
            std::vector<std::uint32_t> label(g.n), next(g.n);
            for (NodeId v = 0; v < g.n; ++v)
                label[v] = static_cast<std::uint32_t>(
                    splitmix_next(seed * 0x9E3779B97F4A7C15ULL + v).output % p);
            std::vector<std::vector<NodeId>> neigh(g.n);
            for (EdgeId e = 0; e < g.m; ++e) {
                neigh[g.in_src[e]].push_back(g.edge_dst[e]);
                neigh[g.edge_dst[e]].push_back(g.in_src[e]);
            }
            for (auto& adj : neigh) {  // antiparallel edges vote once
                std::sort(adj.begin(), adj.end());
                adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
            }
            std::uint64_t cap = std::max<std::uint64_t>(
                (static_cast<std::uint64_t>(g.n) * 115 + 100 * p - 1) /
                    (100 * p),
                1);
            std::vector<std::uint32_t> freq(p, 0);
            std::vector<std::uint64_t> size(p, 0);
            for (int round = 0; round < 10; ++round) {
                std::fill(size.begin(), size.end(), 0);
                for (NodeId v = 0; v < g.n; ++v) {
                    std::fill(freq.begin(), freq.end(), 0);
                    freq[label[v]] = 1;
                    for (NodeId u : neigh[v]) freq[label[u]]++;
                    std::uint32_t best = p;
                    for (std::uint32_t c = 0; c < p; ++c) {
                        if (size[c] >= cap) continue;
                        if (best == p || freq[c] > freq[best]) best = c;
                    }
                    next[v] = best;
                    size[best]++;
                }
                label.swap(next);
            }
            // a label can still starve; give every empty part one node from
            // the largest part so downstream quotas stay well-defined
            std::fill(size.begin(), size.end(), 0);
            for (NodeId v = 0; v < g.n; ++v) size[label[v]]++;
            for (std::uint32_t c = 0; c < p; ++c) {
                if (size[c] > 0) continue;
                std::uint32_t donor = static_cast<std::uint32_t>(
                    std::max_element(size.begin(), size.end()) - size.begin());
                for (NodeId v = g.n; v-- > 0;) {
                    if (label[v] == donor) {
                        label[v] = c;
                        size[donor]--;
                        size[c]++;
                        break;
                    }
                }
            }
            part.assign = std::move(label);
            break;
        }
        case PartitionMethod::ExternalFile: {
            std::ifstream in(part_file);
            if (!in) throw DataError("cannot open part file: " + part_file);
            std::uint64_t id;
            NodeId v = 0;
            while (in >> id) {
                if (v >= g.n) throw DataError("part file longer than n");
                if (id >= p)
                    throw DataError("part id " + std::to_string(id) +
                                    " out of range");
                part.assign[v++] = static_cast<std::uint32_t>(id);
            }
            if (v != g.n) throw DataError("part file shorter than n");
            break;
        }
    }
    rebuild_base(g, part);
    return extend_partition(g, std::move(part), 0);
}

Partitioning extend_partition(const ProbGraph& g, Partitioning part,
                              std::uint32_t h) {
    part.hops = h;
    part.extended.assign(part.p, std::vector<std::uint8_t>(g.n, 0));
    for (std::uint32_t i = 0; i < part.p; ++i) {
        auto& mask = part.extended[i];
        std::vector<NodeId> frontier = part.base[i];
        for (NodeId v : frontier) mask[v] = 1;
        for (std::uint32_t hop = 0; hop < h && !frontier.empty(); ++hop) {
            std::vector<NodeId> next;
            for (NodeId v : frontier) {
                for (NodeId u : g.in_sources(v)) {
                    if (!mask[u]) {
                        mask[u] = 1;
                        next.push_back(u);
                    }
                }
            }
            frontier.swap(next);
        }
    }
    return part;
}

void save_partition(const Partitioning& part, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write part file: " + path);
    for (std::uint32_t id : part.assign) out << id << '\n';
}

DistributedResult distributed_sample(const ProbGraph& g, const SuspectSet& vi,
                                     const Partitioning& part,
                                     std::uint64_t total_target,
                                     std::uint64_t seed, std::uint32_t workers,
                                     const SamplerConfig& cfg) {
    for (std::uint32_t i = 0; i < part.p; ++i)
        if (part.base[i].empty())
            throw DataError("part " + std::to_string(i) + " is empty");

    // quotas proportional to |part i| by largest remainder
    DistributedResult res;
    res.targets.assign(part.p, 0);
    std::vector<std::pair<double, std::uint32_t>> rema(part.p);
    std::uint64_t assigned = 0;
    for (std::uint32_t i = 0; i < part.p; ++i) {
        double share = static_cast<double>(total_target) *
                       static_cast<double>(part.base[i].size()) /
                       static_cast<double>(g.n);
        res.targets[i] = static_cast<std::uint64_t>(share);
        assigned += res.targets[i];
        rema[i] = {share - static_cast<double>(res.targets[i]), i};
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::uint64_t r = 0; r < total_target - assigned; ++r)
        res.targets[rema[r % part.p].second]++;

    if (workers == 0) workers = 1;
    for (std::uint32_t i = 0; i < part.p; ++i) {
        std::span<const NodeId> domain(part.base[i]);
        const std::uint8_t* mask = part.extended[i].data();

        // materialize whole batches, then cut at the minimal prefix reaching
        // the quota so the result is independent of worker count
        std::vector<HsawSample> samples;
        std::vector<WalkTag> tags;
        std::vector<std::uint64_t> accepted_after;  // cumulative per batch
        std::vector<std::uint64_t> crossed_after;
        std::uint64_t next_batch = 0;
        std::uint64_t grow = std::max<std::uint64_t>(workers * 4, 64);

        while (samples.size() < res.targets[i]) {
            std::uint64_t attempts_so_far = next_batch * cfg.batch_size;
            std::uint64_t budget_left = cfg.max_attempts > attempts_so_far
                                            ? cfg.max_attempts - attempts_so_far
                                            : 0;
            std::uint64_t max_batches = budget_left / cfg.batch_size;
            if (max_batches == 0)
                throw SamplingError(
                    "attempt budget exhausted in partitioned sampling");
            std::uint64_t batches;
            if (samples.empty()) {
                batches = grow;
                grow = std::min<std::uint64_t>(grow * 4, 1u << 20);
            } else {
                double rate = static_cast<double>(samples.size()) /
                              static_cast<double>(attempts_so_far);
                double est =
                    static_cast<double>(res.targets[i] - samples.size()) /
                    (rate * static_cast<double>(cfg.batch_size));
                batches = static_cast<std::uint64_t>(est * 1.1) + 1;
            }
            batches = std::max<std::uint64_t>(std::min(batches, max_batches),
                                              1);

            std::vector<detail::RestrictedBatch> results(batches);
            std::atomic<std::uint64_t> cursor{0};
            auto work = [&]() {
                DecodeContext dc(g, vi);
                for (;;) {
                    std::uint64_t b = cursor.fetch_add(1);
                    if (b >= batches) return;
                    std::uint64_t wid =
                        seed + i * kPartStride + next_batch + b;
                    results[b] = detail::sample_batch_restricted(
                        g, vi, wid, cfg.batch_size, cfg, domain, mask, dc);
                }
            };
            if (workers == 1) {
                work();
            } else {
                std::vector<std::thread> threads;
                for (std::uint32_t t = 0; t < workers; ++t)
                    threads.emplace_back(work);
                for (auto& t : threads) t.join();
            }

            for (std::uint64_t b = 0; b < batches; ++b) {
                auto& rb = results[b];
                std::uint64_t wid = seed + i * kPartStride + next_batch + b;
                for (std::size_t si = 0; si < rb.samples.size(); ++si) {
                    samples.push_back(std::move(rb.samples[si]));
                    tags.push_back({wid, rb.seqs[si]});
                }
                accepted_after.push_back(samples.size());
                crossed_after.push_back(
                    (crossed_after.empty() ? 0 : crossed_after.back()) +
                    rb.crossings);
            }
            next_batch += batches;
        }

        std::uint64_t cut_batches = 0;
        if (res.targets[i] > 0) {
            auto it = std::lower_bound(accepted_after.begin(),
                                       accepted_after.end(), res.targets[i]);
            cut_batches =
                static_cast<std::uint64_t>(it - accepted_after.begin()) + 1;
        }
        std::uint64_t keep =
            cut_batches == 0 ? 0 : accepted_after[cut_batches - 1];
        for (std::uint64_t si = 0; si < keep; ++si) {
            res.pool.samples.push_back(std::move(samples[si]));
            res.pool.tags.push_back(tags[si]);
        }
        res.crossings += cut_batches == 0 ? 0 : crossed_after[cut_batches - 1];
        res.attempts += cut_batches * cfg.batch_size;
    }
    res.pool.attempts = res.attempts;
    res.crossing_fraction = res.attempts == 0
                                ? 0.0
                                : static_cast<double>(res.crossings) /
                                      static_cast<double>(res.attempts);
    return res;
}

}  // namespace hsaw
