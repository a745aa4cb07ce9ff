#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "hsaw/graph.hpp"
#include "hsaw/prng.hpp"
#include "hsaw/types.hpp"

namespace hsaw {

// (seed, length) pair that losslessly encodes one hitting self-avoiding walk.
// seed is the generator state immediately before the walk's first draw; len
// is the number of edges traversed up to and including the accepting step
// (0 for a walk that was accepted at its start node).
struct EncodedWalk {
    PrgState seed;
    std::uint32_t len = 0;
    std::uint64_t worker_id = 0;
    std::uint32_t seq = 0;
};

struct HsawSample {
    std::vector<NodeId> nodes;     // v1..vl, pairwise distinct
    std::vector<EdgeId> edge_ids;  // l-1 traversed edges

    NodeId source() const { return nodes.front(); }
    NodeId hit() const { return nodes.back(); }
};

struct WalkTag {
    std::uint64_t worker_id = 0;
    std::uint32_t seq = 0;
};

struct SamplePool {
    std::vector<HsawSample> samples;  // ordered by (worker_id, seq)
    std::vector<WalkTag> tags;        // parallel to samples
    std::uint64_t attempts = 0;       // every walk start, including failures

    std::uint64_t accepted() const { return samples.size(); }
};

enum class CycleHeuristic { Brent, Floyd, None };

struct SamplerConfig {
    CycleHeuristic heuristic = CycleHeuristic::Brent;
    std::uint32_t window = 2;  // exact short-cycle window; 0 disables
    std::uint32_t batch_size = 10;
    std::uint64_t max_attempts = 100'000'000;
};

struct NaiveSampleResult {
    HsawSample sample;
    std::uint64_t attempts_used = 0;
};

// Reference sampler: exact visited set, retries until a walk hits. Throws
// SamplingError once max_attempts walk starts failed.
NaiveSampleResult sample_hsaw_naive(const ProbGraph& g, const SuspectSet& vi,
                                    PrgState& s,
                                    std::uint64_t max_attempts = 100'000'000);

// Observer for instrumented generation (tests compare decoded node sequences
// against what generation actually walked).
using WalkObserver =
    std::function<void(const EncodedWalk&, std::span<const NodeId>)>;

// Constant-space batch sampler: seeds from splitmix(worker_id), burns 8
// draws, then runs l attempts, emitting (seed, len) for each accepted walk.
// Cycle handling is heuristic; decode re-checks exactly.
std::vector<EncodedWalk> thread_sample(const ProbGraph& g,
                                       const SuspectSet& vi,
                                       std::uint64_t worker_id, std::uint32_t l,
                                       const SamplerConfig& cfg = {},
                                       const WalkObserver* observer = nullptr);

// Replays an encoded walk with an exact visited set. Returns nothing when the
// replay uncovers a cycle the generation heuristic missed; throws DataError on
// replay disagreement (wrong graph, suspects, or seed).
class DecodeContext {
public:
    explicit DecodeContext(const ProbGraph& g, const SuspectSet& vi);
    std::optional<HsawSample> decode(const EncodedWalk& ew);

    // Restricted start domain used by the partitioned sampler; must match the
    // domain the walk was generated with.
    std::optional<HsawSample> decode_restricted(
        const EncodedWalk& ew, std::span<const NodeId> start_domain);

private:
    const ProbGraph& g_;
    const SuspectSet& vi_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t epoch_ = 0;
};

std::optional<HsawSample> decode_walk(const ProbGraph& g, const SuspectSet& vi,
                                      const EncodedWalk& ew);

// Standalone cycle detectors over one replayed attempt: true iff the walk,
// extended until a terminating event (no edge, acceptance, length cap),
// revisits a node that the detector can see. The exact-oracle variant is the
// ground truth the heuristics are measured against.
bool detect_cycle_floyd(const ProbGraph& g, const SuspectSet& vi,
                        PrgState seed);
bool detect_cycle_brent(const ProbGraph& g, const SuspectSet& vi,
                        PrgState seed);
bool detect_cycle_exact(const ProbGraph& g, const SuspectSet& vi,
                        PrgState seed);

// Outcome of one attempt under a given detector: accepted or not. Used by the
// detector-agreement harnesses.
struct AttemptVerdict {
    bool accepted = false;
    bool cycle_flagged = false;
};
AttemptVerdict run_attempt_with(const ProbGraph& g, const SuspectSet& vi,
                                PrgState& s, CycleHeuristic heuristic,
                                std::uint32_t window);
AttemptVerdict run_attempt_exact(const ProbGraph& g, const SuspectSet& vi,
                                 PrgState& s);

// Incremental stream of decoded samples in deterministic (worker_id, seq)
// order. Batches are issued as worker ids seed+0, seed+1, ...; a pool for a
// given target is cut at the first whole-batch prefix whose accepted count
// reaches the target, so it is a pure function of (graph, suspects, seed,
// target) regardless of worker count or how far the stream over-materialized.
class SampleStream {
public:
    SampleStream(const ProbGraph& g, const SuspectSet& vi, std::uint64_t seed,
                 std::uint32_t workers, SamplerConfig cfg = {});

    // Grow the stream until at least min_accepted samples are materialized.
    void ensure(std::uint64_t min_accepted);

    std::span<const HsawSample> prefix(std::uint64_t offset,
                                       std::uint64_t count) const;

    struct Counters {
        std::uint64_t attempts = 0;
        std::uint64_t accepted = 0;
    };
    // Attempt/accepted counts of the minimal batch prefix reaching the target.
    Counters counters_for(std::uint64_t min_accepted) const;

    SamplePool to_pool(std::uint64_t min_accepted) const;

private:
    const ProbGraph& g_;
    const SuspectSet& vi_;
    std::uint64_t seed_;
    std::uint32_t workers_;
    SamplerConfig cfg_;
    std::vector<HsawSample> samples_;
    std::vector<WalkTag> tags_;
    std::vector<std::uint64_t> accepted_after_batch_;  // cumulative
    std::uint64_t next_batch_ = 0;
};

SamplePool stream_samples(const ProbGraph& g, const SuspectSet& vi,
                          std::uint32_t workers, std::uint64_t target,
                          std::uint64_t seed = 0, const SamplerConfig& cfg = {});

// Unbiased spread estimate from the rejection rate: n * accepted / attempts.
double estimate_influence(const SamplePool& pool, NodeId n);

// Debug dump, one line per sample: "worker seq len v1 v2 ... vl".
void dump_walks(const SamplePool& pool, std::ostream& out);

namespace detail {

// One batch of the partitioned sampler: starts restricted to a node list,
// walks aborted (and counted) when they need the adjacency of a node outside
// the allowed mask. Emitted walks are decoded with the same start domain.
struct RestrictedBatch {
    std::vector<HsawSample> samples;
    std::vector<std::uint32_t> seqs;
    std::uint32_t crossings = 0;
};

RestrictedBatch sample_batch_restricted(const ProbGraph& g,
                                        const SuspectSet& vi,
                                        std::uint64_t worker_id,
                                        std::uint32_t l,
                                        const SamplerConfig& cfg,
                                        std::span<const NodeId> start_domain,
                                        const std::uint8_t* allowed,
                                        DecodeContext& dc);

}  // namespace detail

}  // namespace hsaw
