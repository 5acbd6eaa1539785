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

#include "cachescope/pipeline.hpp"

#include <algorithm>

namespace cachescope {

ProfilePipeline::ProfilePipeline(const RunConfig& cfg, const TraceHeader& header)
    : cfg_(cfg),
      header_(header),
      sim_(header.cache),
      sampler_(cfg.sampler),
      checker_(cfg.window_capacity, cfg.filters.window_ratio),
      bp_(cfg.bp),
      objects_(cfg.skip),
      globals_(header.globals),
      miss_store_(header.cache),
      instr_store_() {
    cfg_.validate();
}

void ProfilePipeline::on_event(const TraceEvent& ev) {
    ++stats_.events;
    const uint64_t seq = event_seq(ev);
    last_seq_ = seq;

    if (auto pattern = bp_.check_expiry(seq)) instr_store_.attach_pattern(*pattern);

    if (const auto* alloc = std::get_if<AllocEvent>(&ev)) {
        objects_.insert(*alloc);
        return;
    }
    if (const auto* fr = std::get_if<FreeEvent>(&ev)) {
        objects_.erase(*fr);
        return;
    }
    on_access(std::get<AccessEvent>(ev));
}

void ProfilePipeline::on_access(const AccessEvent& ev) {
    ++stats_.accesses;
    const AccessOutcome out = sim_.access(ev.tid, ev.addr, ev.kind);

    // Fine-grained collection sees every access of the armed instruction.
    if (bp_.active() && ev.ip == bp_.target()) {
        std::optional<FineObject> obj;
        if (auto rec = objects_.lookup(ev.addr))
            obj = FineObject{rec->start, rec->size, rec->callsite, rec->alloc_tid};
        if (auto pattern = bp_.observe(ev, out.set_index, obj))
            instr_store_.attach_pattern(*pattern);
    }

    auto rec = sampler_.step(ev, out);
    if (!rec) return;
    ++stats_.samples;

    if (ev.kind == AccessKind::Load) {
        ++totals_.loads;
        if (rec->miss) ++totals_.load_misses;
    } else {
        ++totals_.stores;
        if (rec->miss) ++totals_.store_misses;
    }

    instr_store_.record_sample(*rec);

    if (const auto* region = globals_.lookup(ev.addr)) {
        auto& rc = regions_[region->name];
        ++rc.accesses;
        if (rec->miss) ++rc.misses;
    } else if (auto heap = objects_.lookup(ev.addr)) {
        objects_.attribute(heap->callsite, rec->miss);
    }

    auto batch = checker_.update(*rec);
    if (!batch) return;
    for (const auto& miss : *batch) {
        miss_store_.update(miss);
        instr_store_.record_flushed_miss(miss);
    }
    if (auto target = select_breakpoint_target(instr_store_, bp_, cfg_.bp)) {
        bp_.install(*target, ev.seq);
        instr_store_.begin_epoch();
    }
}

ProfileResult ProfilePipeline::finish() {
    if (!finished_) {
        finished_ = true;
        if (auto pattern = bp_.finish(last_seq_)) instr_store_.attach_pattern(*pattern);
    }

    ProfileResult res;
    res.totals = totals_;
    res.gate_passed = global_gate(totals_, cfg_.filters);
    res.issues = classify(miss_store_, instr_store_, objects_, globals_, header_.symbols,
                          totals_, cfg_.filters, cfg_.bp, header_.cache);
    res.stats = stats_;
    res.stats.flush_batches = checker_.flush_batches();
    res.stats.flushed_misses = checker_.flushed_misses();
    res.stats.bp = bp_.stats();
    res.regions = regions_;
    return res;
}

OracleRun::OracleRun(const CacheConfig& cfg, uint64_t warmup_accesses)
    : sim_(cfg), warmup_(warmup_accesses) {}

void OracleRun::on_event(const TraceEvent& ev) {
    const auto* a = std::get_if<AccessEvent>(&ev);
    if (!a) return;
    if (warmup_ > 0 && seen_ == warmup_) sim_.reset_counters();
    ++seen_;
    sim_.access(a->tid, a->addr, a->kind);
}

OracleResult oracle_result(const OracleRun& run, const std::string& trace_id) {
    OracleResult res;
    res.trace_id = trace_id;
    res.warmup_accesses = run.warmup_accesses();
    res.totals = run.sim().totals();
    res.lines.assign(run.sim().line_misses().begin(), run.sim().line_misses().end());
    std::sort(res.lines.begin(), res.lines.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return res;
}

}  // namespace cachescope
