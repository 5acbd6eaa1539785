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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cachescope/cache_sim.hpp"
#include "cachescope/trace.hpp"

namespace cachescope {

enum class WorkloadKind : uint8_t {
    FalseSharing,
    TrueSharing,
    ConflictStride,
    CapacityLoops,
    AllocFalseSharing,
    AllocConflict,
    Baseline,
    MinorIssue,
};

const char* workload_kind_name(WorkloadKind k);
std::optional<WorkloadKind> workload_kind_from(const std::string& name);

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::Baseline;
    uint32_t threads = 0;     // 0 -> kind default
    uint64_t iterations = 0;  // 0 -> kind default
    uint64_t seed = 1;
    uint32_t stride_lines = 0;  // conflict kinds: distinct lines per set
    uint32_t object_size = 0;   // allocator kinds
    uint32_t scale = 4;         // capacity: array bytes = scale * cache capacity
};

// What the generator planted, for agreement checking.
struct GroundTruth {
    std::string id;
    std::string expected_kind;    // true-sharing | false-sharing | conflict | capacity | none
    std::string expected_origin;  // application | allocator | none
    std::vector<uint64_t> ips;
    std::vector<uint64_t> callsites;
    uint64_t warmup_accesses = 0;
    bool expect_report = true;
};

GroundTruth parse_ground_truth(const TraceHeader& header);

using EventSink = std::function<void(const TraceEvent&)>;

// A planned workload: the header (with the ground truth embedded as
// "# GT key=value" lines) plus a replayable event stream. emit() is
// deterministic for a given spec and produces the same events every call.
struct Workload {
    TraceHeader header;
    GroundTruth gt;
    std::function<void(const EventSink&)> emit;
};

// Validates the spec against the cache geometry and builds the generator.
// Impossible parameter combinations (e.g. a conflict stride that fits in the
// associativity) throw std::invalid_argument with the violated constraint.
Workload build_workload(const WorkloadSpec& spec, const CacheConfig& cfg);

}  // namespace cachescope
