#pragma once

#include <cstdint>
#include <utility>

#include "hsaw/types.hpp"

// Deterministic pseudo-random machinery. The walk encoding stores a PrgState
// snapshot and replays the identical draw sequence, so every operation here
// must consume a fixed number of draws and be bit-exact across platforms.

namespace hsaw {

// xorshift64* state. The recurrence has fixed point 0, so state 0 is invalid.
struct PrgState {
    std::uint64_t state = 0x853C49E6748FEA9BULL;

    friend bool operator==(const PrgState& a, const PrgState& b) {
        return a.state == b.state;
    }
};

struct SplitMixResult {
    std::uint64_t state;
    std::uint64_t output;
};

// SplitMix-style mixer used to seed per-worker generators from worker ids.
inline SplitMixResult splitmix_next(std::uint64_t state) {
    std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
    std::uint64_t out = z;
    out ^= out >> 30;
    out *= 0xBF58476D1CE4E5B9ULL;
    out ^= out >> 27;
    out *= 0x94D049BB133111EBULL;
    out ^= out >> 31;
    return {z, out};
}

// xorshift64*: advances the state and returns the scrambled output.
inline std::uint64_t prg_next(PrgState& s) {
    std::uint64_t x = s.state;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    s.state = x;
    return x * 0x2545F4914F6CDD1DULL;
}

// Top 53 bits to a double in [0, 1).
inline double u01(std::uint64_t output) {
    return static_cast<double>(output >> 11) * 0x1.0p-53;
}

// floor(u01 * n); one draw, no rejection (modulo bias is negligible at 53 bits
// and a fixed draw count is required for replay).
inline NodeId pick_uniform_node(PrgState& s, NodeId n) {
    double r = u01(prg_next(s));
    auto v = static_cast<NodeId>(r * static_cast<double>(n));
    return v < n ? v : n - 1;
}

// Seed a worker generator: one splitmix step of the worker id, skipping the
// forbidden zero state.
inline PrgState seed_from_worker(std::uint64_t worker_id) {
    std::uint64_t st = worker_id;
    for (;;) {
        SplitMixResult r = splitmix_next(st);
        if (r.output != 0) return PrgState{r.output};
        st = r.state;
    }
}

}  // namespace hsaw
