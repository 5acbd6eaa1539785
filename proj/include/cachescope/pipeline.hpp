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

#include <map>
#include <string>
#include <vector>

#include "cachescope/classifier.hpp"
#include "cachescope/profiler.hpp"
#include "cachescope/run_config.hpp"
#include "cachescope/stores.hpp"
#include "cachescope/trace.hpp"

namespace cachescope {

struct PipelineStats {
    uint64_t events = 0;
    uint64_t accesses = 0;
    uint64_t samples = 0;
    uint64_t flush_batches = 0;
    uint64_t flushed_misses = 0;
    BreakpointHandler::Stats bp;
};

struct RegionCounters {
    uint64_t accesses = 0;
    uint64_t misses = 0;
};

struct ProfileResult {
    SampleTotals totals;
    bool gate_passed = false;
    std::vector<IssueReport> issues;
    PipelineStats stats;
    std::map<std::string, RegionCounters> regions;  // sampled global-region traffic
};

// The end-to-end profiling state machine: simulated hardware, coarse
// sampler, miss-ratio windows, breakpoint handler, the three stores, and the
// final classification pass.
class ProfilePipeline {
public:
    ProfilePipeline(const RunConfig& cfg, const TraceHeader& header);

    void on_event(const TraceEvent& ev);
    ProfileResult finish();

    const CacheSim& sim() const { return sim_; }
    const ObjectStore& objects() const { return objects_; }
    const InstructionStore& instructions() const { return instr_store_; }
    const MissStore& misses() const { return miss_store_; }
    const BreakpointHandler& breakpoint() const { return bp_; }
    uint64_t flush_batches() const { return checker_.flush_batches(); }

private:
    void on_access(const AccessEvent& ev);

    RunConfig cfg_;
    TraceHeader header_;
    CacheSim sim_;
    AccessSampler sampler_;
    MissRatioChecker checker_;
    BreakpointHandler bp_;
    ObjectStore objects_;
    GlobalRegions globals_;
    MissStore miss_store_;
    InstructionStore instr_store_;
    SampleTotals totals_;
    PipelineStats stats_;
    std::map<std::string, RegionCounters> regions_;
    uint64_t last_seq_ = 0;
    bool finished_ = false;
};

// Full-trace ground-truth run: every access goes through the simulator, no
// sampling. Counter collection restarts once warmup_accesses have passed.
class OracleRun {
public:
    OracleRun(const CacheConfig& cfg, uint64_t warmup_accesses);

    void on_event(const TraceEvent& ev);

    const CacheSim& sim() const { return sim_; }
    uint64_t accesses_seen() const { return seen_; }
    uint64_t warmup_accesses() const { return warmup_; }

private:
    CacheSim sim_;
    uint64_t warmup_;
    uint64_t seen_ = 0;
};

struct OracleResult {
    std::string trace_id;
    uint64_t warmup_accesses = 0;
    CoreCounters totals;
    std::vector<std::pair<uint64_t, uint64_t>> lines;  // (line, misses), hottest first
};

OracleResult oracle_result(const OracleRun& run, const std::string& trace_id);

}  // namespace cachescope
