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
#include <optional>
#include <vector>

#include "cachescope/common.hpp"

namespace cachescope {

// One coarse-grained sample: an access event plus its simulated outcome.
struct SampledRecord {
    uint32_t tid = 0;
    uint64_t ip = 0;
    uint64_t addr = 0;
    AccessKind kind = AccessKind::Load;
    bool miss = false;
    uint64_t seq = 0;
    uint32_t set_index = 0;
    uint64_t line_addr = 0;

    bool operator==(const SampledRecord&) const = default;
};

enum class FineOutcome : uint8_t { SameSetConflict, MultiSetCapacity, Inconclusive };

const char* fine_outcome_name(FineOutcome o);

// Heap object identity captured while a breakpoint is live, so reports stay
// correct even if the object is freed before classification runs.
struct FineObject {
    uint64_t start = 0;
    uint64_t size = 0;
    uint64_t callsite = 0;
    uint32_t alloc_tid = 0;

    bool operator==(const FineObject&) const = default;
};

struct FineAccess {
    uint64_t addr = 0;
    uint32_t tid = 0;
    uint32_t set_index = 0;
    std::optional<FineObject> object;
};

// Verdict of one fine-grained collection episode for an instruction.
struct FinePattern {
    uint64_t ip = 0;
    FineOutcome outcome = FineOutcome::Inconclusive;
    uint32_t dominant_set = 0;
    uint32_t collected = 0;
    std::vector<FineObject> objects;  // distinct heap objects touched

    uint32_t distinct_heap_objects() const { return static_cast<uint32_t>(objects.size()); }
};

}  // namespace cachescope
