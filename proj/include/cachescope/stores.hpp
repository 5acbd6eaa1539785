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
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cachescope/cache_sim.hpp"
#include "cachescope/profiler_types.hpp"
#include "cachescope/trace.hpp"

namespace cachescope {

struct ObjectRecord {
    uint64_t start = 0;
    uint64_t size = 0;
    uint64_t callsite = 0;
    uint32_t alloc_tid = 0;

    uint64_t end() const { return start + size; }  // exclusive
    bool contains(uint64_t addr) const { return addr >= start && addr < end(); }
    bool operator==(const ObjectRecord&) const = default;
};

struct CallsiteStats {
    uint64_t allocs = 0;
    uint64_t accesses = 0;
    uint64_t misses = 0;
    bool skip_latched = false;
};

// Heap object index with three mutually exclusive levels: objects inside one
// 4KB page live in the page table, objects crossing pages but staying inside
// one 1MB chunk live in the chunk table, everything else goes to a sorted
// huge-object list. Lookups probe page, then chunk, then huge; entries within
// a level are sorted by start address and binary searched.
class ObjectStore {
public:
    enum class Level { Page, Chunk, Huge };

    struct SkipPolicy {
        uint64_t min_samples = 1000;
        double fraction = 0.1;
    };

    explicit ObjectStore(SkipPolicy policy = {}) : policy_(policy) {}

    static Level level_for(uint64_t start, uint64_t size);

    // Overlap with a live indexed object throws std::invalid_argument naming
    // both ranges. Allocations from a skip-latched callsite are counted but
    // not indexed.
    void insert(const AllocEvent& ev);
    // Unmatched address throws std::invalid_argument.
    void erase(const FreeEvent& ev);

    std::optional<ObjectRecord> lookup(uint64_t addr) const;
    std::vector<ObjectRecord> objects_overlapping(uint64_t lo, uint64_t hi) const;

    // Sampled-access attribution; feeds the callsite-skip heuristic.
    void attribute(uint64_t callsite, bool miss);

    // Latches (and then keeps reporting) true once the callsite has enough
    // attributed samples and a miss ratio far under the global average.
    bool callsite_skip(uint64_t callsite);
    bool callsite_skipped(uint64_t callsite) const;

    const std::unordered_map<uint64_t, CallsiteStats>& callsites() const { return callsites_; }
    size_t live_count() const { return by_start_.size(); }
    uint64_t attributed_accesses() const { return total_accesses_; }
    uint64_t attributed_misses() const { return total_misses_; }

    // Full structural check; test support. Throws std::logic_error on any
    // partition violation.
    void check_partition() const;

    static constexpr uint32_t kPageShift = 12;
    static constexpr uint32_t kChunkShift = 20;

private:
    std::vector<ObjectRecord>& bucket_for(const ObjectRecord& rec);
    void remove_from_level(const ObjectRecord& rec);

    SkipPolicy policy_;
    std::unordered_map<uint64_t, std::vector<ObjectRecord>> page_table_;
    std::unordered_map<uint64_t, std::vector<ObjectRecord>> chunk_table_;
    std::vector<ObjectRecord> huge_list_;
    std::map<uint64_t, ObjectRecord> by_start_;  // live indexed objects
    std::unordered_set<uint64_t> skipped_starts_;
    std::unordered_map<uint64_t, CallsiteStats> callsites_;
    uint64_t total_accesses_ = 0;
    uint64_t total_misses_ = 0;
};

// Sorted, non-overlapping global regions declared in the trace header.
class GlobalRegions {
public:
    explicit GlobalRegions(std::vector<GlobalRegion> regions);
    const GlobalRegion* lookup(uint64_t addr) const;

private:
    std::vector<GlobalRegion> regions_;
};

// Distinct thread ids seen on one word, capped; classification only ever
// asks for "two or more".
struct TidSet {
    static constexpr size_t kCap = 8;
    std::vector<uint32_t> tids;
    bool saturated = false;

    void add(uint32_t tid);
    size_t distinct() const { return saturated ? kCap + 1 : tids.size(); }
};

struct WordTrack {
    TidSet loads;
    TidSet stores;

    std::vector<uint32_t> all_tids() const;
};

struct LineMissEntry {
    uint64_t misses = 0;
    std::vector<WordTrack> words;
    std::unordered_map<uint64_t, uint64_t> ip_misses;
};

// Flushed-miss aggregation: per-set counters plus a per-line map carrying
// word-level thread tracking.
class MissStore {
public:
    explicit MissStore(const CacheConfig& cfg);

    void update(const SampledRecord& rec);

    const std::vector<uint64_t>& set_misses() const { return set_misses_; }
    const std::unordered_map<uint64_t, LineMissEntry>& lines() const { return lines_; }
    uint64_t total() const { return total_; }

private:
    CacheConfig cfg_;
    std::vector<uint64_t> set_misses_;
    std::unordered_map<uint64_t, LineMissEntry> lines_;
    uint64_t total_ = 0;
};

struct InstructionStats {
    uint64_t ip = 0;
    uint64_t sampled_loads = 0;
    uint64_t sampled_stores = 0;
    uint64_t flushed_load_misses = 0;
    uint64_t flushed_store_misses = 0;
    std::unordered_map<uint32_t, uint64_t> set_histogram;
    // Misses per set delivered since the last breakpoint epoch began.
    std::unordered_map<uint32_t, uint64_t> epoch_set_misses;
    // Consecutive sampled misses; any sampled hit resets it.
    uint32_t miss_run = 0;
    std::optional<FinePattern> pattern;

    uint64_t sampled_accesses() const { return sampled_loads + sampled_stores; }
    uint64_t flushed_misses() const { return flushed_load_misses + flushed_store_misses; }
};

class InstructionStore {
public:
    void record_sample(const SampledRecord& rec);
    void record_flushed_miss(const SampledRecord& rec);
    void attach_pattern(const FinePattern& pattern);
    void begin_epoch();

    const std::unordered_map<uint64_t, InstructionStats>& stats() const { return stats_; }
    const InstructionStats* find(uint64_t ip) const;
    uint64_t total_sampled() const { return total_sampled_; }
    uint64_t total_flushed() const { return total_flushed_; }

private:
    std::unordered_map<uint64_t, InstructionStats> stats_;
    uint64_t total_sampled_ = 0;
    uint64_t total_flushed_ = 0;
};

}  // namespace cachescope
