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

#include "cachescope/stores.hpp"

#include <algorithm>
#include <stdexcept>

namespace cachescope {

namespace {

// Binary search within one sorted level bucket.
const ObjectRecord* find_in(const std::vector<ObjectRecord>& v, uint64_t addr) {
    auto it = std::upper_bound(v.begin(), v.end(), addr,
                               [](uint64_t a, const ObjectRecord& r) { return a < r.start; });
    if (it == v.begin()) return nullptr;
    --it;
    return it->contains(addr) ? &*it : nullptr;
}

void sorted_insert(std::vector<ObjectRecord>& v, const ObjectRecord& rec) {
    auto it = std::lower_bound(v.begin(), v.end(), rec.start,
                               [](const ObjectRecord& r, uint64_t a) { return r.start < a; });
    v.insert(it, rec);
}

bool sorted_erase(std::vector<ObjectRecord>& v, uint64_t start) {
    auto it = std::lower_bound(v.begin(), v.end(), start,
                               [](const ObjectRecord& r, uint64_t a) { return r.start < a; });
    if (it == v.end() || it->start != start) return false;
    v.erase(it);
    return true;
}

}  // namespace

ObjectStore::Level ObjectStore::level_for(uint64_t start, uint64_t size) {
    const uint64_t last = start + size - 1;
    if ((start >> kPageShift) == (last >> kPageShift)) return Level::Page;
    if ((start >> kChunkShift) == (last >> kChunkShift)) return Level::Chunk;
    return Level::Huge;
}

std::vector<ObjectRecord>& ObjectStore::bucket_for(const ObjectRecord& rec) {
    switch (level_for(rec.start, rec.size)) {
        case Level::Page: return page_table_[rec.start >> kPageShift];
        case Level::Chunk: return chunk_table_[rec.start >> kChunkShift];
        case Level::Huge: return huge_list_;
    }
    return huge_list_;
}

void ObjectStore::insert(const AllocEvent& ev) {
    if (ev.size == 0) throw std::invalid_argument("zero-size allocation");
    auto& cs = callsites_[ev.callsite];
    ++cs.allocs;
    if (callsite_skip(ev.callsite)) {
        skipped_starts_.insert(ev.addr);
        return;
    }

    auto it = by_start_.upper_bound(ev.addr);
    if (it != by_start_.begin()) {
        auto prev = std::prev(it);
        if (prev->second.end() > ev.addr)
            throw std::invalid_argument("allocation " + to_hex(ev.addr) + "+" +
                                        std::to_string(ev.size) + " overlaps live object " +
                                        to_hex(prev->first) + "+" +
                                        std::to_string(prev->second.size));
    }
    if (it != by_start_.end() && it->first < ev.addr + ev.size)
        throw std::invalid_argument("allocation " + to_hex(ev.addr) + "+" +
                                    std::to_string(ev.size) + " overlaps live object " +
                                    to_hex(it->first) + "+" + std::to_string(it->second.size));

    ObjectRecord rec{ev.addr, ev.size, ev.callsite, ev.tid};
    sorted_insert(bucket_for(rec), rec);
    by_start_[rec.start] = rec;
}

void ObjectStore::erase(const FreeEvent& ev) {
    if (skipped_starts_.erase(ev.addr)) return;
    auto it = by_start_.find(ev.addr);
    if (it == by_start_.end())
        throw std::invalid_argument("unmatched free of " + to_hex(ev.addr));
    remove_from_level(it->second);
    by_start_.erase(it);
}

void ObjectStore::remove_from_level(const ObjectRecord& rec) {
    bool removed = false;
    switch (level_for(rec.start, rec.size)) {
        case Level::Page: {
            auto b = page_table_.find(rec.start >> kPageShift);
            removed = b != page_table_.end() && sorted_erase(b->second, rec.start);
            if (removed && b->second.empty()) page_table_.erase(b);
            break;
        }
        case Level::Chunk: {
            auto b = chunk_table_.find(rec.start >> kChunkShift);
            removed = b != chunk_table_.end() && sorted_erase(b->second, rec.start);
            if (removed && b->second.empty()) chunk_table_.erase(b);
            break;
        }
        case Level::Huge:
            removed = sorted_erase(huge_list_, rec.start);
            break;
    }
    if (!removed) throw std::logic_error("object missing from its level index");
}

std::optional<ObjectRecord> ObjectStore::lookup(uint64_t addr) const {
    if (auto it = page_table_.find(addr >> kPageShift); it != page_table_.end()) {
        if (const auto* r = find_in(it->second, addr)) return *r;
    }
    if (auto it = chunk_table_.find(addr >> kChunkShift); it != chunk_table_.end()) {
        if (const auto* r = find_in(it->second, addr)) return *r;
    }
    if (const auto* r = find_in(huge_list_, addr)) return *r;
    return std::nullopt;
}

std::vector<ObjectRecord> ObjectStore::objects_overlapping(uint64_t lo, uint64_t hi) const {
    std::vector<ObjectRecord> out;
    auto it = by_start_.upper_bound(lo);
    if (it != by_start_.begin()) {
        auto prev = std::prev(it);
        if (prev->second.end() > lo) out.push_back(prev->second);
    }
    for (; it != by_start_.end() && it->first < hi; ++it) out.push_back(it->second);
    return out;
}

void ObjectStore::attribute(uint64_t callsite, bool miss) {
    auto& cs = callsites_[callsite];
    ++cs.accesses;
    ++total_accesses_;
    if (miss) {
        ++cs.misses;
        ++total_misses_;
    }
}

bool ObjectStore::callsite_skip(uint64_t callsite) {
    auto it = callsites_.find(callsite);
    if (it == callsites_.end()) return false;
    auto& cs = it->second;
    if (cs.skip_latched) return true;
    if (cs.accesses < policy_.min_samples || total_accesses_ == 0) return false;
    const double global = static_cast<double>(total_misses_) / static_cast<double>(total_accesses_);
    const double own = static_cast<double>(cs.misses) / static_cast<double>(cs.accesses);
    if (own < policy_.fraction * global) {
        cs.skip_latched = true;
        return true;
    }
    return false;
}

bool ObjectStore::callsite_skipped(uint64_t callsite) const {
    auto it = callsites_.find(callsite);
    return it != callsites_.end() && it->second.skip_latched;
}

void ObjectStore::check_partition() const {
    size_t indexed = 0;
    auto check_bucket = [&](const std::vector<ObjectRecord>& v, Level level,
                            std::optional<uint64_t> bucket_id, uint32_t shift) {
        uint64_t prev_end = 0;
        for (const auto& r : v) {
            if (level_for(r.start, r.size) != level)
                throw std::logic_error("object " + to_hex(r.start) + " indexed at wrong level");
            if (bucket_id && (r.start >> shift) != *bucket_id)
                throw std::logic_error("object " + to_hex(r.start) + " in wrong bucket");
            if (r.start < prev_end)
                throw std::logic_error("bucket not sorted or overlapping at " + to_hex(r.start));
            prev_end = r.start + 1;
            auto live = by_start_.find(r.start);
            if (live == by_start_.end() || !(live->second == r))
                throw std::logic_error("index entry does not match live object " + to_hex(r.start));
            ++indexed;
        }
    };
    for (const auto& [id, v] : page_table_) check_bucket(v, Level::Page, id, kPageShift);
    for (const auto& [id, v] : chunk_table_) check_bucket(v, Level::Chunk, id, kChunkShift);
    check_bucket(huge_list_, Level::Huge, std::nullopt, 0);
    if (indexed != by_start_.size())
        throw std::logic_error("live object count does not match level indexes");
}

GlobalRegions::GlobalRegions(std::vector<GlobalRegion> regions) : regions_(std::move(regions)) {
    std::sort(regions_.begin(), regions_.end(),
              [](const GlobalRegion& a, const GlobalRegion& b) { return a.start < b.start; });
}

const GlobalRegion* GlobalRegions::lookup(uint64_t addr) const {
    auto it = std::upper_bound(regions_.begin(), regions_.end(), addr,
                               [](uint64_t a, const GlobalRegion& r) { return a < r.start; });
    if (it == regions_.begin()) return nullptr;
    --it;
    return (addr >= it->start && addr < it->start + it->size) ? &*it : nullptr;
}

void TidSet::add(uint32_t tid) {
    if (saturated) return;
    auto it = std::lower_bound(tids.begin(), tids.end(), tid);
    if (it != tids.end() && *it == tid) return;
    if (tids.size() >= kCap) {
        saturated = true;
        return;
    }
    tids.insert(it, tid);
}

std::vector<uint32_t> WordTrack::all_tids() const {
    std::vector<uint32_t> out = loads.tids;
    for (uint32_t t : stores.tids) {
        auto it = std::lower_bound(out.begin(), out.end(), t);
        if (it == out.end() || *it != t) out.insert(it, t);
    }
    return out;
}

MissStore::MissStore(const CacheConfig& cfg) : cfg_(cfg) {
    set_misses_.assign(cfg_.num_sets, 0);
}

void MissStore::update(const SampledRecord& rec) {
    ++set_misses_[rec.set_index];
    ++total_;
    auto& entry = lines_[rec.line_addr];
    if (entry.words.empty()) entry.words.resize(cfg_.words_per_line());
    ++entry.misses;
    ++entry.ip_misses[rec.ip];
    auto& track = entry.words[cfg_.word_of(rec.addr)];
    (rec.kind == AccessKind::Load ? track.loads : track.stores).add(rec.tid);
}

void InstructionStore::record_sample(const SampledRecord& rec) {
    auto& st = stats_[rec.ip];
    st.ip = rec.ip;
    if (rec.kind == AccessKind::Load) ++st.sampled_loads; else ++st.sampled_stores;
    st.miss_run = rec.miss ? st.miss_run + 1 : 0;
    ++total_sampled_;
}

void InstructionStore::record_flushed_miss(const SampledRecord& rec) {
    auto& st = stats_[rec.ip];
    st.ip = rec.ip;
    if (rec.kind == AccessKind::Load) ++st.flushed_load_misses; else ++st.flushed_store_misses;
    ++st.set_histogram[rec.set_index];
    ++st.epoch_set_misses[rec.set_index];
    ++total_flushed_;
}

void InstructionStore::attach_pattern(const FinePattern& pattern) {
    auto& st = stats_[pattern.ip];
    st.ip = pattern.ip;
    st.pattern = pattern;
}

void InstructionStore::begin_epoch() {
    for (auto& [ip, st] : stats_) st.epoch_set_misses.clear();
}

const InstructionStats* InstructionStore::find(uint64_t ip) const {
    auto it = stats_.find(ip);
    return it == stats_.end() ? nullptr : &it->second;
}

}  // namespace cachescope
