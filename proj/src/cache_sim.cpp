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

#include "cachescope/cache_sim.hpp"

#include <algorithm>
#include <stdexcept>

namespace cachescope {

namespace {
bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }
}  // namespace

void CacheConfig::validate() const {
    if (line_size < 8 || !is_pow2(line_size))
        throw std::invalid_argument("line_size must be a power of two >= 8");
    if (num_sets < 1 || !is_pow2(num_sets))
        throw std::invalid_argument("num_sets must be a power of two >= 1");
    if (associativity < 1) throw std::invalid_argument("associativity must be >= 1");
    if (num_cores < 1) throw std::invalid_argument("num_cores must be >= 1");
}

uint32_t set_index(uint64_t addr, const CacheConfig& cfg) {
    return cfg.set_of(addr);
}

const char* miss_kind_name(MissKind k) {
    switch (k) {
        case MissKind::Hit: return "hit";
        case MissKind::Compulsory: return "compulsory";
        case MissKind::Capacity: return "capacity";
        case MissKind::Conflict: return "conflict";
        case MissKind::Coherence: return "coherence";
    }
    return "?";
}

void CoreCounters::add(const CoreCounters& o) {
    loads += o.loads;
    stores += o.stores;
    load_hits += o.load_hits;
    store_hits += o.store_hits;
    for (size_t i = 0; i < 5; ++i) {
        load_misses[i] += o.load_misses[i];
        store_misses[i] += o.store_misses[i];
    }
    if (set_misses.size() < o.set_misses.size()) set_misses.resize(o.set_misses.size());
    for (size_t i = 0; i < o.set_misses.size(); ++i) set_misses[i] += o.set_misses[i];
}

CacheSim::CacheSim(const CacheConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    cores_.resize(cfg_.num_cores);
    counters_.resize(cfg_.num_cores);
    for (auto& cs : cores_) cs.sets.resize(cfg_.num_sets);
    for (auto& c : counters_) c.set_misses.assign(cfg_.num_sets, 0);
}

void CacheSim::touch_shadow(CoreState& cs, uint64_t line) {
    auto it = cs.shadow_pos.find(line);
    if (it != cs.shadow_pos.end()) {
        cs.shadow.splice(cs.shadow.begin(), cs.shadow, it->second);
        it->second = cs.shadow.begin();
        return;
    }
    cs.shadow.push_front(line);
    cs.shadow_pos[line] = cs.shadow.begin();
    if (cs.shadow.size() > cfg_.total_lines()) {
        cs.shadow_pos.erase(cs.shadow.back());
        cs.shadow.pop_back();
    }
}

AccessOutcome CacheSim::access(uint32_t core, uint64_t addr, AccessKind kind) {
    if (core >= cfg_.num_cores)
        throw std::invalid_argument("unknown core id " + std::to_string(core));

    const uint64_t line = cfg_.line_of(addr);
    const uint32_t set = cfg_.set_of(addr);
    CoreState& cs = cores_[core];
    CoreCounters& ctr = counters_[core];
    auto& ways = cs.sets[set];

    auto pos = std::find(ways.begin(), ways.end(), line);
    const bool hit = pos != ways.end();
    MissKind mk = MissKind::Hit;

    if (hit) {
        std::rotate(ways.begin(), pos, pos + 1);  // move to MRU
    } else {
        if (cs.invalidated.count(line)) {
            mk = MissKind::Coherence;
        } else if (!ever_accessed_.count(line)) {
            mk = MissKind::Compulsory;
        } else if (cs.shadow_pos.count(line)) {
            mk = MissKind::Conflict;
        } else {
            mk = MissKind::Capacity;
        }
        ways.insert(ways.begin(), line);
        if (ways.size() > cfg_.associativity) ways.pop_back();
    }
    cs.invalidated.erase(line);
    touch_shadow(cs, line);
    ever_accessed_.insert(line);

    if (kind == AccessKind::Load) {
        ++ctr.loads;
        if (hit) ++ctr.load_hits; else ++ctr.load_misses[static_cast<size_t>(mk)];
    } else {
        ++ctr.stores;
        if (hit) ++ctr.store_hits; else ++ctr.store_misses[static_cast<size_t>(mk)];
    }
    if (!hit) {
        ++ctr.set_misses[set];
        ++line_misses_[line];
    }

    if (kind == AccessKind::Store) {
        for (uint32_t other = 0; other < cfg_.num_cores; ++other) {
            if (other == core) continue;
            CoreState& os = cores_[other];
            auto& oways = os.sets[set];
            auto opos = std::find(oways.begin(), oways.end(), line);
            if (opos != oways.end()) {
                oways.erase(opos);
                os.invalidated.insert(line);
            }
            auto sp = os.shadow_pos.find(line);
            if (sp != os.shadow_pos.end()) {
                os.shadow.erase(sp->second);
                os.shadow_pos.erase(sp);
            }
        }
    }

    return AccessOutcome{hit, mk, set, line};
}

const CoreCounters& CacheSim::counters(uint32_t core) const {
    if (core >= cfg_.num_cores)
        throw std::invalid_argument("unknown core id " + std::to_string(core));
    return counters_[core];
}

CoreCounters CacheSim::totals() const {
    CoreCounters sum;
    sum.set_misses.assign(cfg_.num_sets, 0);
    for (const auto& c : counters_) sum.add(c);
    return sum;
}

void CacheSim::reset_counters() {
    for (auto& c : counters_) {
        c = CoreCounters{};
        c.set_misses.assign(cfg_.num_sets, 0);
    }
    line_misses_.clear();
}

}  // namespace cachescope
