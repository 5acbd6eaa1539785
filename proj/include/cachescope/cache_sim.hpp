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

#include <array>
#include <cstdint>
#include <list>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cachescope/common.hpp"

namespace cachescope {

struct CacheConfig {
    uint32_t line_size = 64;
    uint32_t num_sets = 128;
    uint32_t associativity = 8;
    uint32_t num_cores = 16;

    // Throws std::invalid_argument on malformed geometry.
    void validate() const;

    uint64_t line_of(uint64_t addr) const { return addr & ~static_cast<uint64_t>(line_size - 1); }
    uint32_t set_of(uint64_t addr) const {
        return static_cast<uint32_t>((addr / line_size) % num_sets);
    }
    uint32_t word_of(uint64_t addr) const {
        return static_cast<uint32_t>((addr % line_size) / kWordSize);
    }
    uint32_t words_per_line() const { return line_size / kWordSize; }
    uint64_t capacity_bytes() const {
        return static_cast<uint64_t>(line_size) * num_sets * associativity;
    }
    uint64_t total_lines() const { return static_cast<uint64_t>(num_sets) * associativity; }

    static constexpr uint32_t kWordSize = 8;

    bool operator==(const CacheConfig&) const = default;
};

uint32_t set_index(uint64_t addr, const CacheConfig& cfg);

enum class MissKind : uint8_t { Hit = 0, Compulsory, Capacity, Conflict, Coherence };

const char* miss_kind_name(MissKind k);

struct AccessOutcome {
    bool hit;
    MissKind kind;
    uint32_t set_index;
    uint64_t line_addr;

    bool operator==(const AccessOutcome&) const = default;
};

// Per-core access/miss counters. Miss counts are indexed by MissKind with
// slot 0 (Hit) always zero.
struct CoreCounters {
    uint64_t loads = 0;
    uint64_t stores = 0;
    uint64_t load_hits = 0;
    uint64_t store_hits = 0;
    std::array<uint64_t, 5> load_misses{};
    std::array<uint64_t, 5> store_misses{};
    std::vector<uint64_t> set_misses;

    uint64_t accesses() const { return loads + stores; }
    uint64_t hits() const { return load_hits + store_hits; }
    uint64_t misses(MissKind k) const {
        return load_misses[static_cast<size_t>(k)] + store_misses[static_cast<size_t>(k)];
    }
    uint64_t total_misses() const {
        uint64_t n = 0;
        for (size_t i = 1; i < 5; ++i) n += load_misses[i] + store_misses[i];
        return n;
    }
    void add(const CoreCounters& o);
};

// Multi-core set-associative cache with write-invalidate coherence.
//
// Each core owns a private LRU cache plus a fully-associative LRU shadow of
// equal capacity. The shadow never affects hit/miss results; it exists to
// label a miss Conflict (shadow hit) versus Capacity (shadow miss). A store
// removes the line from every other core and leaves an invalidation marker
// behind wherever the line was actually resident, so the next access by that
// core is labeled Coherence.
class CacheSim {
public:
    explicit CacheSim(const CacheConfig& cfg);

    // Throws std::invalid_argument for core >= num_cores.
    AccessOutcome access(uint32_t core, uint64_t addr, AccessKind kind);

    const CacheConfig& config() const { return cfg_; }
    const CoreCounters& counters(uint32_t core) const;
    CoreCounters totals() const;
    const std::unordered_map<uint64_t, uint64_t>& line_misses() const { return line_misses_; }

    // Zeroes all counters but keeps cache contents and first-touch history,
    // so stats can be collected for the post-warm-up portion of a trace.
    void reset_counters();

private:
    struct CoreState {
        // One vector per set, most recently used first.
        std::vector<std::vector<uint64_t>> sets;
        // Fully associative shadow, most recently used first.
        std::list<uint64_t> shadow;
        std::unordered_map<uint64_t, std::list<uint64_t>::iterator> shadow_pos;
        // Lines that were resident here and got invalidated by a remote store.
        std::unordered_set<uint64_t> invalidated;
    };

    void touch_shadow(CoreState& cs, uint64_t line);

    CacheConfig cfg_;
    std::vector<CoreState> cores_;
    std::vector<CoreCounters> counters_;
    std::unordered_set<uint64_t> ever_accessed_;
    std::unordered_map<uint64_t, uint64_t> line_misses_;
};

}  // namespace cachescope
