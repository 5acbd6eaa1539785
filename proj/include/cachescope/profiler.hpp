// Copyright 2026 The cachescope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "cachescope/cache_sim.hpp"
#include "cachescope/profiler_types.hpp"
#include "cachescope/stores.hpp"
#include "cachescope/trace.hpp"

namespace cachescope {

struct SamplerConfig {
    uint64_t load_period = 20000;
    uint64_t store_period = 50000;
    double jitter = 0.10;
    uint64_t seed = 1;

    void validate() const;
};

// Periodic access sampling with per-thread, per-kind countdown counters.
// Every reset re-draws the countdown uniformly from
// [period*(1-jitter), period*(1+jitter)] on a thread-private RNG lane.
class AccessSampler {
public:
    explicit AccessSampler(const SamplerConfig& cfg);

    std::optional<SampledRecord> step(const AccessEvent& ev, const AccessOutcome& out);

private:
    struct Lane {
        std::mt19937_64 rng;
        uint64_t countdown;
    };

    Lane& lane(uint32_t tid, AccessKind kind);
    uint64_t draw(Lane& l, AccessKind kind);

    SamplerConfig cfg_;
    std::map<std::pair<uint32_t, uint8_t>, Lane> lanes_;
};

using FlushBatch = std::vector<SampledRecord>;

// Per-thread, per-kind circular buffers of recent samples. When a buffer's
// miss ratio rises strictly above the threshold, all not-yet-flushed miss
// records in it are released as a batch; a record is flushed at most once.
class MissRatioChecker {
public:
    MissRatioChecker(uint32_t capacity, double threshold);

    std::optional<FlushBatch> update(const SampledRecord& rec);

    uint64_t flush_batches() const { return flush_batches_; }
    uint64_t flushed_misses() const { return flushed_misses_; }

private:
    struct Entry {
        SampledRecord rec;
        bool consumed = false;
    };
    struct Window {
        std::vector<Entry> ring;
        size_t head = 0;   // oldest element
        size_t count = 0;
        uint64_t misses = 0;
    };

    uint32_t capacity_;
    double threshold_;
    std::map<std::pair<uint32_t, uint8_t>, Window> windows_;
    uint64_t flush_batches_ = 0;
    uint64_t flushed_misses_ = 0;
};

struct BreakpointConfig {
    uint32_t max_accesses = 64;      // collection cap per installed breakpoint
    uint32_t same_set_run = 8;       // consecutive same-set accesses for early exit
    uint32_t consec_misses = 4;      // sampled miss run that nominates an instruction
    uint32_t set_total = 8;          // per-set flushed misses that nominate an instruction
    uint64_t expiry_events = 100000; // lifetime of a breakpoint, in trace events

    void validate() const;
};

// Emulated hardware breakpoint: at most one armed instruction globally. It
// observes every trace access of the target ip and finalizes into a
// FinePattern on an 8-long same-set run, at the 64-access cap, or at expiry.
class BreakpointHandler {
public:
    explicit BreakpointHandler(const BreakpointConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

    bool active() const { return st_.has_value(); }
    uint64_t target() const { return st_ ? st_->ip : 0; }

    void install(uint64_t ip, uint64_t now_seq);

    // Call once per trace event before anything else touches the handler.
    std::optional<FinePattern> check_expiry(uint64_t now_seq);
    // Call for access events while active; ignores non-target ips.
    std::optional<FinePattern> observe(const AccessEvent& ev, uint32_t set,
                                       const std::optional<FineObject>& object);
    // End-of-trace finalization of a still-armed breakpoint.
    std::optional<FinePattern> finish(uint64_t now_seq);

    struct Stats {
        uint64_t installs = 0;
        uint64_t early_exits = 0;
        uint64_t cap_finalizes = 0;
        uint64_t expiry_finalizes = 0;
        uint64_t overlap_violations = 0;  // install attempts while armed
    };
    const Stats& stats() const { return stats_; }

private:
    struct State {
        uint64_t ip;
        uint64_t install_seq;
        std::vector<FineAccess> collected;
        std::map<uint32_t, uint32_t> set_counts;
        std::vector<FineObject> objects;  // distinct, ordered by first touch
        uint32_t run = 0;
        uint32_t run_set = 0;
    };

    FinePattern conclude(bool expired);

    BreakpointConfig cfg_;
    std::optional<State> st_;
    Stats stats_;
};

// Picks the next instruction to arm: first any ip whose sampled miss run
// reached consec_misses, otherwise any ip with set_total flushed misses on
// one set in the current epoch. Ties prefer more flushed misses, then the
// lower ip. Returns nothing while a breakpoint is armed. Instructions that
// already own a FinePattern are not re-nominated.
std::optional<uint64_t> select_breakpoint_target(const InstructionStore& instrs,
                                                 const BreakpointHandler& bp,
                                                 const BreakpointConfig& cfg);

}  // namespace cachescope
