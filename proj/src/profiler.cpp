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

#include "cachescope/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cachescope {

const char* fine_outcome_name(FineOutcome o) {
    switch (o) {
        case FineOutcome::SameSetConflict: return "same-set-conflict";
        case FineOutcome::MultiSetCapacity: return "multi-set-capacity";
        case FineOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

void SamplerConfig::validate() const {
    if (load_period < 1 || store_period < 1)
        throw std::invalid_argument("sampling periods must be >= 1");
    if (jitter < 0.0 || jitter >= 1.0)
        throw std::invalid_argument("jitter must be in [0, 1)");
}

AccessSampler::AccessSampler(const SamplerConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
}

AccessSampler::Lane& AccessSampler::lane(uint32_t tid, AccessKind kind) {
    auto key = std::make_pair(tid, static_cast<uint8_t>(kind));
    auto it = lanes_.find(key);
    if (it == lanes_.end()) {
        Lane l;
        l.rng.seed(mix64(cfg_.seed ^ mix64((static_cast<uint64_t>(tid) << 1) | key.second)));
        l.countdown = 0;
        it = lanes_.emplace(key, std::move(l)).first;
        it->second.countdown = draw(it->second, kind);
    }
    return it->second;
}

uint64_t AccessSampler::draw(Lane& l, AccessKind kind) {
    const uint64_t period = kind == AccessKind::Load ? cfg_.load_period : cfg_.store_period;
    const auto lo = static_cast<uint64_t>(std::llround(period * (1.0 - cfg_.jitter)));
    const auto hi = static_cast<uint64_t>(std::llround(period * (1.0 + cfg_.jitter)));
    return std::max<uint64_t>(1, uniform_in(l.rng, lo, hi));
}

std::optional<SampledRecord> AccessSampler::step(const AccessEvent& ev,
                                                 const AccessOutcome& out) {
    Lane& l = lane(ev.tid, ev.kind);
    if (--l.countdown > 0) return std::nullopt;
    l.countdown = draw(l, ev.kind);
    return SampledRecord{ev.tid, ev.ip,        ev.addr,      ev.kind,
                         !out.hit, ev.seq, out.set_index, out.line_addr};
}

MissRatioChecker::MissRatioChecker(uint32_t capacity, double threshold)
    : capacity_(capacity), threshold_(threshold) {
    if (capacity_ < 1) throw std::invalid_argument("window capacity must be >= 1");
    if (threshold_ < 0.0 || threshold_ > 1.0)
        throw std::invalid_argument("window ratio must be in [0, 1]");
}

std::optional<FlushBatch> MissRatioChecker::update(const SampledRecord& rec) {
    auto key = std::make_pair(rec.tid, static_cast<uint8_t>(rec.kind));
    Window& w = windows_[key];
    if (w.ring.empty()) w.ring.resize(capacity_);

    if (w.count == capacity_) {
        Entry& oldest = w.ring[w.head];
        if (oldest.rec.miss) --w.misses;
        oldest = Entry{rec, false};
        w.head = (w.head + 1) % capacity_;
    } else {
        w.ring[(w.head + w.count) % capacity_] = Entry{rec, false};
        ++w.count;
    }
    if (rec.miss) ++w.misses;

    const double ratio = static_cast<double>(w.misses) / static_cast<double>(w.count);
    if (!(ratio > threshold_)) return std::nullopt;

    FlushBatch batch;
    for (size_t i = 0; i < w.count; ++i) {
        Entry& e = w.ring[(w.head + i) % capacity_];
        if (e.rec.miss && !e.consumed) {
            e.consumed = true;
            batch.push_back(e.rec);
        }
    }
    if (batch.empty()) return std::nullopt;
    ++flush_batches_;
    flushed_misses_ += batch.size();
    return batch;
}

void BreakpointConfig::validate() const {
    if (max_accesses < 1) throw std::invalid_argument("breakpoint cap must be >= 1");
    if (same_set_run < 1) throw std::invalid_argument("same-set run must be >= 1");
    if (expiry_events < 1) throw std::invalid_argument("expiry must be >= 1 event");
}

void BreakpointHandler::install(uint64_t ip, uint64_t now_seq) {
    if (st_) {
        ++stats_.overlap_violations;
        throw std::logic_error("breakpoint already armed");
    }
    st_ = State{ip, now_seq, {}, {}, {}, 0, 0};
    ++stats_.installs;
}

FinePattern BreakpointHandler::conclude(bool expired) {
    State st = std::move(*st_);
    st_.reset();

    FinePattern p;
    p.ip = st.ip;
    p.collected = static_cast<uint32_t>(st.collected.size());
    p.objects = std::move(st.objects);

    if (st.run >= cfg_.same_set_run) {
        p.outcome = FineOutcome::SameSetConflict;
        p.dominant_set = st.run_set;
        return p;
    }
    if (expired && st.collected.size() < cfg_.same_set_run) {
        p.outcome = FineOutcome::Inconclusive;
        return p;
    }
    uint32_t best_set = 0;
    uint32_t best = 0;
    for (const auto& [set, n] : st.set_counts) {
        if (n > best) {
            best = n;
            best_set = set;
        }
    }
    if (best >= cfg_.same_set_run) {
        p.outcome = FineOutcome::SameSetConflict;
        p.dominant_set = best_set;
    } else {
        p.outcome = FineOutcome::MultiSetCapacity;
    }
    return p;
}

std::optional<FinePattern> BreakpointHandler::check_expiry(uint64_t now_seq) {
    if (!st_ || now_seq - st_->install_seq < cfg_.expiry_events) return std::nullopt;
    ++stats_.expiry_finalizes;
    return conclude(true);
}

std::optional<FinePattern> BreakpointHandler::observe(const AccessEvent& ev, uint32_t set,
                                                      const std::optional<FineObject>& object) {
    if (!st_ || ev.ip != st_->ip) return std::nullopt;
    State& st = *st_;
    st.collected.push_back(FineAccess{ev.addr, ev.tid, set, object});
    ++st.set_counts[set];
    if (object) {
        auto same = [&](const FineObject& o) { return o.start == object->start; };
        if (std::find_if(st.objects.begin(), st.objects.end(), same) == st.objects.end())
            st.objects.push_back(*object);
    }
    if (st.run > 0 && set == st.run_set) {
        ++st.run;
    } else {
        st.run = 1;
        st.run_set = set;
    }
    if (st.run >= cfg_.same_set_run) {
        ++stats_.early_exits;
        return conclude(false);
    }
    if (st.collected.size() >= cfg_.max_accesses) {
        ++stats_.cap_finalizes;
        return conclude(false);
    }
    return std::nullopt;
}

std::optional<FinePattern> BreakpointHandler::finish(uint64_t) {
    if (!st_) return std::nullopt;
    ++stats_.expiry_finalizes;
    return conclude(true);
}

std::optional<uint64_t> select_breakpoint_target(const InstructionStore& instrs,
                                                 const BreakpointHandler& bp,
                                                 const BreakpointConfig& cfg) {
    if (bp.active()) return std::nullopt;

    const InstructionStats* best = nullptr;
    bool best_is_run = false;
    auto better = [&](const InstructionStats& a, bool a_run) {
        if (!best) return true;
        if (a_run != best_is_run) return a_run;
        if (a.flushed_misses() != best->flushed_misses())
            return a.flushed_misses() > best->flushed_misses();
        return a.ip < best->ip;
    };

    for (const auto& [ip, st] : instrs.stats()) {
        if (st.pattern) continue;
        bool run_hit = st.miss_run >= cfg.consec_misses;
        bool set_hit = false;
        if (!run_hit) {
            for (const auto& [set, n] : st.epoch_set_misses) {
                if (n >= cfg.set_total) {
                    set_hit = true;
                    break;
                }
            }
        }
        if (!run_hit && !set_hit) continue;
        if (better(st, run_hit)) {
            best = &st;
            best_is_run = run_hit;
        }
    }
    if (!best) return std::nullopt;
    return best->ip;
}

}  // namespace cachescope
