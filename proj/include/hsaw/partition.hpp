#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsaw/graph.hpp"
#include "hsaw/sampler.hpp"
#include "hsaw/types.hpp"

namespace hsaw {

// Node partition plus per-part extended membership (h-hop in-neighborhood
// closure). Walks may traverse into the extension but must not continue past
// it; that is what the crossing counter measures.
struct Partitioning {
    std::uint32_t p = 1;
    std::uint32_t hops = 0;
    std::vector<std::uint32_t> assign;            // node -> part
    std::vector<std::vector<NodeId>> base;        // part -> owned nodes
    std::vector<std::vector<std::uint8_t>> extended;  // part -> mask over nodes

    std::size_t extended_size(std::uint32_t part) const;
};

enum class PartitionMethod { Hash, LabelProp, ExternalFile };

Partitioning partition_graph(const ProbGraph& g, std::uint32_t p,
                             PartitionMethod method, std::uint64_t seed,
                             const std::string& part_file = "");

// Recompute the extended sets as the h-step in-neighborhood closure.
Partitioning extend_partition(const ProbGraph& g, Partitioning part,
                              std::uint32_t h);

void save_partition(const Partitioning& part, const std::string& path);

struct DistributedResult {
    SamplePool pool;
    std::uint64_t crossings = 0;
    std::uint64_t attempts = 0;
    double crossing_fraction = 0;
    std::vector<std::uint64_t> targets;  // per-part accepted-sample quotas
};

// Per-part quota proportional to |part|; each part samples independently on
// its extended subgraph with starts restricted to its base nodes. Crossing
// walks are aborted and counted, never pooled.
DistributedResult distributed_sample(const ProbGraph& g, const SuspectSet& vi,
                                     const Partitioning& part,
                                     std::uint64_t total_target,
                                     std::uint64_t seed = 0,
                                     std::uint32_t workers = 1,
                                     const SamplerConfig& cfg = {});

}  // namespace hsaw
