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
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "cachescope/profiler.hpp"
#include "cachescope/stores.hpp"

namespace cachescope {

struct FilterThresholds {
    double global_load_gate = 0.03;
    double global_store_gate = 0.01;
    double instr_access_floor = 0.0001;
    double instr_miss_floor = 0.01;
    double line_set_miss_floor = 0.01;
    double window_ratio = 0.005;
    double miss_penalty = 200.0;
    // Share of an instruction's flushed misses that must land on reported
    // coherence lines before it is excluded from conflict/capacity checks.
    double checked_share = 0.5;

    void validate() const;
};

enum class IssueType : uint8_t {
    TrueSharing,
    AppFalseSharing,
    AllocFalseSharing,
    AppConflict,
    AllocConflict,
    AppCapacity,
};

const char* issue_type_name(IssueType t);
// "true-sharing" / "false-sharing" / "conflict" / "capacity"
const char* issue_kind_label(IssueType t);
// "application" / "allocator"
const char* issue_origin_label(IssueType t);

struct ObjectInfo {
    uint64_t callsite = 0;
    uint64_t size = 0;
    uint32_t alloc_tid = 0;

    bool operator==(const ObjectInfo&) const = default;
};

struct IssueReport {
    IssueType type;
    std::vector<uint64_t> ips;             // sorted ascending
    std::string statement;                 // file:line when symbolized
    std::optional<uint64_t> line_addr;
    std::optional<uint32_t> set_index;
    std::vector<ObjectInfo> objects;
    std::vector<std::string> regions;      // global region names touched
    double access_ratio = 0.0;
    double miss_ratio = 0.0;
    double slowdown_bound = 1.0;
};

// Sampled-population totals used by the global gate and severity ratios.
struct SampleTotals {
    uint64_t loads = 0;
    uint64_t load_misses = 0;
    uint64_t stores = 0;
    uint64_t store_misses = 0;

    uint64_t accesses() const { return loads + stores; }
};

// False means everything is suppressed: both the load and the store sampled
// miss ratios sit under their gates.
bool global_gate(const SampleTotals& totals, const FilterThresholds& t);

double slowdown_bound(double access_ratio, double penalty);

struct LineClassification {
    std::vector<IssueReport> reports;
    std::unordered_set<uint64_t> checked_ips;
};

LineClassification classify_lines(const MissStore& misses, const InstructionStore& instrs,
                                  const ObjectStore& objects, const GlobalRegions& globals,
                                  const SampleTotals& totals, const FilterThresholds& t,
                                  const CacheConfig& cfg);

std::vector<IssueReport> classify_instructions(const InstructionStore& instrs,
                                               const std::unordered_set<uint64_t>& checked_ips,
                                               const SampleTotals& totals,
                                               const FilterThresholds& t,
                                               const BreakpointConfig& bp);

std::vector<IssueReport> summarize_statements(std::vector<IssueReport> reports,
                                              const std::map<uint64_t, std::string>& symbols);

// The whole Algorithm-1 pass over final store snapshots: gate, line loop,
// instruction loop, statement grouping, severity ordering.
std::vector<IssueReport> classify(const MissStore& misses, const InstructionStore& instrs,
                                  const ObjectStore& objects, const GlobalRegions& globals,
                                  const std::map<uint64_t, std::string>& symbols,
                                  const SampleTotals& totals, const FilterThresholds& t,
                                  const BreakpointConfig& bp, const CacheConfig& cfg);

}  // namespace cachescope
